"""Experiment/model file handling and analysis-report assembly.

Experiment file format (JSON)
-----------------------------
::

    {
      "treatments": {
        "a,b":   {"pp": ".049", "pm": ".630", "mp": ".259", "mm": ".062"},
        "a,b'":  {"pp": 48, "pm": 2, "mp": 24, "mm": 7, "n": 81},
        "a',b":  {...},
        "a',b'": {...}
      },
      "labels": {                      # optional, all sub-blocks optional
        "factors":   {"alpha": "animal", "beta": "sound"},
        "levels":    {"a": "Horse or Bear?", ...},
        "responses": {"a": ["Horse", "Bear"], ...}
      },
      "renormalize": true,             # optional, default false
      "independent_counts": true       # optional, default false
    }

All four treatment blocks are required. A block holds either four
probability cells (strings such as ".049" or "49/1000"; bare JSON numbers
are accepted and read via their shortest decimal form) or four integer
count cells with an optional redundant total "n". A probability block may
additionally carry a nested ``"counts"`` object; the two must agree unless
``independent_counts`` is set (for published rounded estimates shipped
alongside sample sizes). Probability cells must sum to exactly 1 unless
``renormalize`` is set, which accepts sums within +-0.01 and rescales.

On output, probabilities are written as exact fraction strings
("49/1000"), so parse(serialize(data)) == data.

Model file format (JSON)
------------------------
::

    {
      "hidden": {"++++": "1/2", "----": "1/2"},   # states by A(a)A(a')B(b)B(b')
      "eta": "0.1",                                # optional contamination rate
      "cross_map": {"a,b": "++", "a,b'": "+-", "a',b": "-+", "a',b'": "--"}
    }

Missing states weigh 0. ``cross_map`` (required when eta > 0) forces the
written outcome pair, A then B, when contamination strikes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Optional, Union

from .chsh import ChshReport, SignPattern, BoundClassification, compute_gamma
from .errors import (
    BadCell,
    ConflictingData,
    InvalidValue,
    MissingTreatment,
    ParseError,
    SumNotOne,
)
from .feasibility import (
    FacetViolation,
    FeasibilityResult,
    HiddenStateDistribution,
    Verdict,
    solve_feasibility,
)
from .model import (
    ALPHA_A,
    ALPHA_A_PRIME,
    BETA_B,
    BETA_B_PRIME,
    TREATMENTS,
    CountTable,
    ExperimentData,
    JointTable,
    LabelSet,
    Rational,
    Treatment,
    rational,
)
from .selectivity import (
    MarginalComparison,
    MarginalReport,
    MsTestResult,
    Response,
    check_marginal_selectivity,
    test_marginal_selectivity,
)
from .simulate import ContaminatedModel, Model, SelectiveModel

TREATMENT_KEYS = tuple(t.key for t in TREATMENTS)
PROB_KEYS = ("pp", "pm", "mp", "mm")

RENORMALIZE_WINDOW = Fraction(1, 100)

_LEVELS_BY_KEY = {
    "a": ALPHA_A,
    "a'": ALPHA_A_PRIME,
    "b": BETA_B,
    "b'": BETA_B_PRIME,
}

JsonDoc = Union[str, Mapping[str, Any]]


def _load(document: JsonDoc, what: str) -> Mapping[str, Any]:
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{what} is not valid JSON: {exc}") from exc
    if not isinstance(document, Mapping):
        raise ParseError(f"{what} must be a JSON object")
    return document


def _parse_count_cells(block: Mapping[str, Any], key: str) -> CountTable:
    cells = []
    for ck in PROB_KEYS:
        v = block[ck]
        if isinstance(v, bool) or not isinstance(v, int):
            raise BadCell(f"treatment {key}: count cell {ck} must be an integer, got {v!r}")
        if v < 0:
            raise BadCell(f"treatment {key}: count cell {ck} is negative")
        cells.append(v)
    if sum(cells) == 0:
        raise BadCell(f"treatment {key}: counts total zero")
    if "n" in block:
        n = block["n"]
        if isinstance(n, bool) or not isinstance(n, int):
            raise BadCell(f"treatment {key}: n must be an integer")
        if n != sum(cells):
            raise ConflictingData(
                f"treatment {key}: counts sum to {sum(cells)} but n = {n}"
            )
    return CountTable(*cells)


def _parse_prob_cells(block: Mapping[str, Any], key: str, renormalize: bool) -> JointTable:
    cells = []
    for ck in PROB_KEYS:
        v = block[ck]
        if isinstance(v, bool) or not isinstance(v, (str, int, float)):
            raise BadCell(f"treatment {key}: cell {ck} must be numeric, got {v!r}")
        try:
            f = rational(v)
        except InvalidValue as exc:
            raise BadCell(f"treatment {key}: cell {ck}: {exc}") from exc
        if f < 0 or f > 1:
            raise BadCell(f"treatment {key}: cell {ck} = {f} outside [0, 1]")
        cells.append(f)
    total = sum(cells)
    if total != 1:
        if not renormalize:
            raise SumNotOne(
                f"treatment {key}: cells sum to {total} "
                f"(~{float(total):.4f}); set \"renormalize\" to accept near-1 sums"
            )
        if abs(total - 1) > RENORMALIZE_WINDOW or total == 0:
            raise SumNotOne(
                f"treatment {key}: cells sum to {total} "
                f"(~{float(total):.4f}), beyond the +-0.01 renormalization window"
            )
        cells = [c / total for c in cells]
    return JointTable(*cells)


def _parse_block(
    block: Any, key: str, renormalize: bool
) -> tuple[JointTable, Optional[CountTable]]:
    if not isinstance(block, Mapping):
        raise ParseError(f"treatment {key}: block must be a JSON object")
    unknown = set(block) - set(PROB_KEYS) - {"counts", "n"}
    if unknown:
        raise ParseError(f"treatment {key}: unknown keys {sorted(unknown)}")
    missing = [ck for ck in PROB_KEYS if ck not in block]
    if missing:
        raise BadCell(f"treatment {key}: missing cells {missing}")
    cell_types = {
        ck: (isinstance(block[ck], int) and not isinstance(block[ck], bool))
        for ck in PROB_KEYS
    }
    if all(cell_types.values()):
        # integer cells are counts
        if "counts" in block:
            raise ParseError(f"treatment {key}: nested counts under a count block")
        counts = _parse_count_cells(block, key)
        return counts.normalized(), counts
    if any(cell_types.values()):
        raise BadCell(
            f"treatment {key}: mix of integer (count) and fractional (probability) cells"
        )
    table = _parse_prob_cells(block, key, renormalize)
    counts = None
    if "counts" in block:
        nested = block["counts"]
        if not isinstance(nested, Mapping):
            raise ParseError(f"treatment {key}: counts must be a JSON object")
        if set(nested) - set(PROB_KEYS) - {"n"}:
            raise ParseError(f"treatment {key}: unknown keys in counts")
        if any(ck not in nested for ck in PROB_KEYS):
            raise BadCell(f"treatment {key}: counts block missing cells")
        counts = _parse_count_cells(nested, key)
    return table, counts


def _parse_labels(raw: Any) -> LabelSet:
    if not isinstance(raw, Mapping):
        raise ParseError("labels must be a JSON object")
    unknown = set(raw) - {"factors", "levels", "responses"}
    if unknown:
        raise ParseError(f"unknown label sections {sorted(unknown)}")
    responses = None
    if "responses" in raw:
        if not isinstance(raw["responses"], Mapping):
            raise ParseError("labels.responses must be a JSON object")
        responses = {}
        for key, pair in raw["responses"].items():
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ParseError(f"labels.responses[{key!r}] must be a two-item list")
            responses[key] = (str(pair[0]), str(pair[1]))
    try:
        return LabelSet(
            factors=raw.get("factors"),
            levels=raw.get("levels"),
            responses=responses,
        )
    except InvalidValue as exc:
        raise ParseError(f"bad labels: {exc}") from exc


def parse_experiment(document: JsonDoc, renormalize: Optional[bool] = None) -> ExperimentData:
    """Parse an experiment file into exact-rational data.

    ``renormalize`` None defers to the file's own flag (default false).
    """
    doc = _load(document, "experiment document")
    unknown = set(doc) - {"treatments", "labels", "renormalize", "independent_counts"}
    if unknown:
        raise ParseError(f"unknown top-level keys {sorted(unknown)}")
    if "treatments" not in doc or not isinstance(doc["treatments"], Mapping):
        raise ParseError('document needs a "treatments" object')
    if renormalize is None:
        renormalize = bool(doc.get("renormalize", False))
    independent = bool(doc.get("independent_counts", False))
    blocks = doc["treatments"]
    unknown = set(blocks) - set(TREATMENT_KEYS)
    if unknown:
        raise ParseError(f"unknown treatment keys {sorted(unknown)}")
    tables = {}
    counts = {}
    for key in TREATMENT_KEYS:
        if key not in blocks:
            raise MissingTreatment(f"treatment block {key!r} is missing")
        table, count = _parse_block(blocks[key], key, renormalize)
        treatment = Treatment.from_key(key)
        tables[treatment] = table
        if count is not None:
            counts[treatment] = count
    labels = _parse_labels(doc["labels"]) if "labels" in doc else None
    try:
        return ExperimentData(
            tables=tables,
            counts=counts or None,
            labels=labels,
            independent_counts=independent,
        )
    except ConflictingData:
        raise
    except InvalidValue as exc:
        raise ParseError(str(exc)) from exc


def serialize_experiment(data: ExperimentData) -> str:
    """Write data back to the file format, probabilities as exact fractions."""
    treatments: dict[str, Any] = {}
    for t in TREATMENTS:
        block: dict[str, Any] = {
            ck: str(cell) for ck, cell in zip(PROB_KEYS, data.table(t).cells())
        }
        ct = data.count(t)
        if ct is not None:
            block["counts"] = dict(zip(PROB_KEYS, ct.cells()))
        treatments[t.key] = block
    doc: dict[str, Any] = {"treatments": treatments}
    if data.labels is not None:
        labels: dict[str, Any] = {}
        if data.labels.factors is not None:
            labels["factors"] = dict(data.labels.factors)
        if data.labels.levels is not None:
            labels["levels"] = dict(data.labels.levels)
        if data.labels.responses is not None:
            labels["responses"] = {k: list(v) for k, v in data.labels.responses.items()}
        doc["labels"] = labels
    if data.independent_counts:
        doc["independent_counts"] = True
    return json.dumps(doc, indent=2)


def parse_model(document: JsonDoc) -> Model:
    """Parse a model file into a selective or contaminated model."""
    doc = _load(document, "model document")
    unknown = set(doc) - {"hidden", "eta", "cross_map"}
    if unknown:
        raise ParseError(f"unknown top-level keys {sorted(unknown)}")
    if "hidden" not in doc or not isinstance(doc["hidden"], Mapping):
        raise ParseError('model needs a "hidden" object of state weights')
    try:
        hidden = HiddenStateDistribution.from_mapping(doc["hidden"])
    except InvalidValue as exc:
        raise ParseError(f"bad hidden-state weights: {exc}") from exc
    eta = Fraction(0)
    if "eta" in doc:
        try:
            eta = rational(doc["eta"])
        except InvalidValue as exc:
            raise ParseError(f"bad eta: {exc}") from exc
    if "cross_map" not in doc:
        if eta != 0:
            raise ParseError("eta > 0 needs a cross_map of forced outcome pairs")
        return SelectiveModel(hidden=hidden)
    raw_map = doc["cross_map"]
    if not isinstance(raw_map, Mapping) or set(raw_map) != set(TREATMENT_KEYS):
        raise ParseError("cross_map must give an outcome pair for all four treatments")
    cross = {}
    for key, pair in raw_map.items():
        if not isinstance(pair, str) or len(pair) != 2 or set(pair) - {"+", "-"}:
            raise ParseError(f"cross_map[{key!r}] must be two of +/-, got {pair!r}")
        cross[Treatment.from_key(key)] = tuple(1 if ch == "+" else -1 for ch in pair)
    try:
        return ContaminatedModel(hidden=hidden, eta=eta, cross_map=cross)
    except InvalidValue as exc:
        raise ParseError(str(exc)) from exc


@dataclass(frozen=True)
class AnalysisReport:
    """Everything one analysis produces: CHSH, marginals, tests, feasibility."""

    chsh: ChshReport
    marginals: MarginalReport
    ms_tests: Optional[tuple[MsTestResult, ...]]
    feasibility: FeasibilityResult


def analyze(
    data: ExperimentData,
    tolerance: Rational = 0,
    alpha_sig: float = 0.05,
    bonferroni: bool = False,
    run_significance: Optional[bool] = None,
) -> AnalysisReport:
    """Run the full pipeline on one experiment.

    Significance tests run when counts are present for all four treatments
    (or when forced with ``run_significance=True``, which raises without
    counts).
    """
    if run_significance is None:
        run_significance = data.has_full_counts()
    ms_tests = None
    if run_significance:
        ms_tests = tuple(test_marginal_selectivity(data, alpha_sig, bonferroni))
    return AnalysisReport(
        chsh=compute_gamma(data),
        marginals=check_marginal_selectivity(data, tolerance),
        ms_tests=ms_tests,
        feasibility=solve_feasibility(data),
    )


REPORT_FORMAT = "selinf-analysis/1"


def _f2s(x: Fraction) -> str:
    return str(Fraction(x))


def _comparison_to_dict(comp: MarginalComparison) -> dict[str, Any]:
    return {
        "response": comp.response.value,
        "fixed_level": comp.fixed_level.key,
        "p_under_first": _f2s(comp.p_under_first),
        "p_under_second": _f2s(comp.p_under_second),
        "delta": _f2s(comp.delta),
    }


def _comparison_from_dict(d: Mapping[str, Any]) -> MarginalComparison:
    return MarginalComparison(
        response=Response(d["response"]),
        fixed_level=_LEVELS_BY_KEY[d["fixed_level"]],
        p_under_first=Fraction(d["p_under_first"]),
        p_under_second=Fraction(d["p_under_second"]),
    )


def certificate_to_dict(cert: Union[MarginalComparison, FacetViolation]) -> dict[str, Any]:
    if isinstance(cert, FacetViolation):
        return {
            "kind": "chsh_facet",
            "pattern": str(cert.pattern),
            "value": _f2s(cert.value),
        }
    return {"kind": "marginal", **_comparison_to_dict(cert)}


def _certificate_from_dict(d: Mapping[str, Any]):
    if d["kind"] == "chsh_facet":
        return FacetViolation(
            pattern=SignPattern.from_string(d["pattern"]), value=Fraction(d["value"])
        )
    return _comparison_from_dict(d)


def witness_to_dict(witness: HiddenStateDistribution) -> dict[str, str]:
    return {str(state): _f2s(w) for state, w in witness.nonzero_items()}


def report_to_json_dict(report: AnalysisReport, include_witness: bool = False) -> dict[str, Any]:
    """Machine rendering; every rational is an exact fraction string."""
    chsh = report.chsh
    ordered_argmax = [str(p) for p in chsh.sums if p in chsh.argmax_patterns]
    out: dict[str, Any] = {
        "format": REPORT_FORMAT,
        "chsh": {
            "expectations": {t.key: _f2s(chsh.expectations[t]) for t in TREATMENTS},
            "sums": {str(p): _f2s(v) for p, v in chsh.sums.items()},
            "gamma": _f2s(chsh.gamma),
            "gamma_decimal": chsh.gamma_decimal(),
            "argmax_patterns": ordered_argmax,
            "classification": chsh.classification.value,
        },
        "marginal_selectivity": {
            "tolerance": _f2s(report.marginals.tolerance),
            "satisfied": report.marginals.satisfied,
            "max_delta": _f2s(report.marginals.max_delta),
            "comparisons": [
                _comparison_to_dict(c) for c in report.marginals.comparisons
            ],
        },
        "statistical_tests": None,
        "feasibility": {
            "verdict": report.feasibility.verdict.value,
            "witness": None,
            "certificate": None,
            "all_violations": [
                certificate_to_dict(c) for c in report.feasibility.all_violations
            ],
        },
    }
    if report.ms_tests is not None:
        out["statistical_tests"] = [
            {
                "comparison": _comparison_to_dict(r.comparison),
                "n_first": r.n_first,
                "n_second": r.n_second,
                "z": r.z_statistic,
                "p_value": r.p_value,
                "reject": r.reject,
                "alpha_sig": r.alpha_sig,
                "degenerate": r.degenerate,
            }
            for r in report.ms_tests
        ]
    if include_witness and report.feasibility.witness is not None:
        out["feasibility"]["witness"] = witness_to_dict(report.feasibility.witness)
    if report.feasibility.certificate is not None:
        out["feasibility"]["certificate"] = certificate_to_dict(
            report.feasibility.certificate
        )
    return out


def report_from_json_dict(doc: Mapping[str, Any]) -> AnalysisReport:
    """Rebuild a report from its machine rendering (lossless round-trip)."""
    if doc.get("format") != REPORT_FORMAT:
        raise ParseError(f"unsupported report format {doc.get('format')!r}")
    raw_chsh = doc["chsh"]
    sums = {
        SignPattern.from_string(k): Fraction(v) for k, v in raw_chsh["sums"].items()
    }
    chsh = ChshReport(
        expectations={
            Treatment.from_key(k): Fraction(v)
            for k, v in raw_chsh["expectations"].items()
        },
        sums=sums,
        gamma=Fraction(raw_chsh["gamma"]),
        argmax_patterns=frozenset(
            SignPattern.from_string(s) for s in raw_chsh["argmax_patterns"]
        ),
        classification=BoundClassification(raw_chsh["classification"]),
    )
    raw_ms = doc["marginal_selectivity"]
    marginals = MarginalReport(
        comparisons=tuple(_comparison_from_dict(c) for c in raw_ms["comparisons"]),
        tolerance=Fraction(raw_ms["tolerance"]),
    )
    ms_tests = None
    if doc.get("statistical_tests") is not None:
        ms_tests = tuple(
            MsTestResult(
                comparison=_comparison_from_dict(r["comparison"]),
                n_first=r["n_first"],
                n_second=r["n_second"],
                z_statistic=r["z"],
                p_value=r["p_value"],
                reject=r["reject"],
                alpha_sig=r["alpha_sig"],
                degenerate=r["degenerate"],
            )
            for r in doc["statistical_tests"]
        )
    raw_feas = doc["feasibility"]
    witness = None
    if raw_feas.get("witness") is not None:
        witness = HiddenStateDistribution.from_mapping(raw_feas["witness"])
    certificate = None
    if raw_feas.get("certificate") is not None:
        certificate = _certificate_from_dict(raw_feas["certificate"])
    feasibility = FeasibilityResult(
        verdict=Verdict(raw_feas["verdict"]),
        witness=witness,
        certificate=certificate,
        all_violations=tuple(
            _certificate_from_dict(c) for c in raw_feas["all_violations"]
        ),
    )
    return AnalysisReport(
        chsh=chsh, marginals=marginals, ms_tests=ms_tests, feasibility=feasibility
    )


def _fmt(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x} (~{float(x):.4f})"


def _comparison_line(comp: MarginalComparison, labels: Optional[LabelSet]) -> str:
    other_first, other_second = (
        ("b", "b'") if comp.response is Response.A else ("a", "a'")
    )
    line = (
        f"{comp.response.value} at {comp.fixed_level.key:2s}: "
        f"Pr(+1|{other_first}) = {_fmt(comp.p_under_first)}  vs  "
        f"Pr(+1|{other_second}) = {_fmt(comp.p_under_second)}  "
        f"delta = {_fmt(comp.delta)}"
    )
    if labels is not None:
        pair = labels.response_pair(comp.fixed_level)
        if pair is not None:
            line += f"   [+1 = {pair[0]}, -1 = {pair[1]}]"
    return line


def render_report_text(
    report: AnalysisReport,
    labels: Optional[LabelSet] = None,
    include_witness: bool = False,
) -> str:
    """Human-readable rendering of a full analysis."""
    lines = []
    chsh = report.chsh
    lines.append("CHSH")
    for t in TREATMENTS:
        lines.append(f"  E[A*B | {t.key:5s}] = {_fmt(chsh.expectations[t])}")
    lines.append(
        f"  Gamma = {chsh.gamma} (= {chsh.gamma_decimal()} to 3 places)"
        f"   classification: {chsh.classification.value}"
    )
    ordered_argmax = [str(p) for p in chsh.sums if p in chsh.argmax_patterns]
    lines.append(f"  attained by sign pattern(s): {', '.join(ordered_argmax)}")
    lines.append("")
    ms = report.marginals
    verdict = "satisfied" if ms.satisfied else "VIOLATED"
    lines.append(
        f"Marginal selectivity (tolerance {ms.tolerance}): {verdict}"
        f" (max delta {_fmt(ms.max_delta)})"
    )
    for comp in ms.comparisons:
        lines.append("  " + _comparison_line(comp, labels))
    lines.append("")
    if report.ms_tests is not None:
        alpha = report.ms_tests[0].alpha_sig if report.ms_tests else 0.05
        lines.append(f"Significance (two-sided pooled z-test, alpha {alpha:g})")
        for r in report.ms_tests:
            flag = "reject" if r.reject else "retain"
            extra = " degenerate" if r.degenerate else ""
            lines.append(
                f"  {r.comparison.response.value} at {r.comparison.fixed_level.key:2s}: "
                f"z = {r.z_statistic:+.3f}  p = {r.p_value:.3g}  -> {flag}{extra}"
                f"  (n = {r.n_first}/{r.n_second})"
            )
        lines.append("")
    feas = report.feasibility
    if feas.feasible:
        lines.append("Hidden-state model: FEASIBLE (a witness distribution exists)")
        if include_witness and feas.witness is not None:
            lines.append("  witness (state A(a)A(a')B(b)B(b') : weight):")
            for state, w in feas.witness.nonzero_items():
                lines.append(f"    {state} : {w}")
    else:
        lines.append("Hidden-state model: INFEASIBLE")
        lines.append(f"  certificate: {describe_certificate(feas.certificate)}")
        if len(feas.all_violations) > 1:
            lines.append("  all violated conditions:")
            for cert in feas.all_violations:
                lines.append(f"    - {describe_certificate(cert)}")
    return "\n".join(lines) + "\n"


def describe_certificate(cert: Union[MarginalComparison, FacetViolation, None]) -> str:
    if cert is None:
        return "(none)"
    if isinstance(cert, FacetViolation):
        return f"CHSH facet {cert.pattern} = {_fmt(cert.value)} > 2"
    return (
        f"marginal comparison {cert.response.value} at {cert.fixed_level.key}: "
        f"{_fmt(cert.p_under_first)} vs {_fmt(cert.p_under_second)}"
        f" (delta {_fmt(cert.delta)} > 0)"
    )

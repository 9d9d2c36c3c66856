"""Command-line entry point: ``subshift-lab analyze | graph | zeta``.

Config documents are JSON::

    {
      "subshift": {"type": "substitution", "rules": {"0": "1", "1": "10"}, "seed": "1"},
      "depth": 60,
      "weight": "inverse",
      "taus": {"strategies": ["lexmin", "hash"], "seeds": [0, 1, 2, 3]},
      "analyses": ["structure", "balance", "powers", "metrics", "lipschitz", "zeta"],
      "seed": 0,
      "metrics": {"pairs": 10},
      "lipschitz": {"profile_depth": 65536, "base_depth": 16},
      "zeta": {"N": 60, "s": [1.2, 1.5, 2, 3], "k": [1, 2, 3]},
      "output": {"report": "report.json", "figures": "figs"}
    }

Only ``subshift`` and ``depth`` are required.  ``subshift.depth``, when given,
is the certified depth of the language; otherwise it is chosen large enough
for the requested analyses.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import platform
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .combinatorics import (
    ReturnBudgetExceeded,
    is_right_special_balanced,
    max_power,
    palindromic_complexity,
    power_witness,
    privileged_words,
    rank_profile,
    repulsiveness_index,
    format_power,
)
from .graph import KINDS, build_approx_graph, check_kind, choice_function, orbit_point, to_dot
from .language import FactorOracle, UncertifiedDepth, UncertifiedLength, oracle_from_json
from .metrics import Indistinguishable, bounded_powers_verdict, lipschitz_profile, metric_report, sample_points
from .weights import audit, weight_from_name
from .zeta import exponent_estimate, inequality_audit, write_csv, zeta_partial, zeta_spectral

log = logging.getLogger("subshift_lab")

MAX_HEADROOM = 64

ANALYSES = ("structure", "balance", "powers", "metrics", "lipschitz", "zeta")

_SCHEMA = {
    "subshift": None,
    "depth": None,
    "weight": None,
    "taus": {"strategies", "seeds"},
    "analyses": None,
    "seed": None,
    "metrics": {"pairs"},
    "lipschitz": {"profile_depth", "base_depth"},
    "zeta": {"N", "s", "k"},
    "output": {"report", "figures"},
}


class ConfigError(ValueError):
    pass


@dataclass
class AnalysisConfig:
    subshift: dict
    depth: int
    weight: str = "inverse"
    strategies: tuple[str, ...] = ("lexmin", "hash")
    seeds: tuple[int, ...] = (0, 1, 2, 3)
    analyses: tuple[str, ...] = ANALYSES
    seed: int = 0
    pairs: int = 10
    profile_depth: int = 1 << 16
    base_depth: int = 16
    zeta_N: int | None = None
    zeta_s: tuple[float, ...] = (1.2, 1.5, 2.0, 3.0)
    zeta_k: tuple[int, ...] = (1, 2, 3)
    output: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def N(self) -> int:
        return self.depth if self.zeta_N is None else self.zeta_N


def _positive_int(value, key: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
        raise ConfigError(f"{key}: a positive integer is required")
    return value


def parse_config(doc) -> AnalysisConfig:
    """Validate a config document; errors name the offending key."""
    if not isinstance(doc, dict) or "subshift" not in doc:
        raise ConfigError("missing subshift spec")
    for key, value in doc.items():
        if key not in _SCHEMA:
            raise ConfigError(f"{key}: unknown key")
        allowed = _SCHEMA[key]
        if allowed is not None:
            if not isinstance(value, dict):
                raise ConfigError(f"{key}: an object is required")
            for sub in value:
                if sub not in allowed:
                    raise ConfigError(f"{key}.{sub}: unknown key")
    if not isinstance(doc["subshift"], dict):
        raise ConfigError("subshift: an object is required")
    if "depth" not in doc:
        raise ConfigError("depth: missing")
    cfg = AnalysisConfig(dict(doc["subshift"]), _positive_int(doc["depth"], "depth"), raw=doc)
    if "weight" in doc:
        try:
            weight_from_name(doc["weight"])
        except (ValueError, AttributeError, TypeError) as exc:
            raise ConfigError(f"weight: {exc}") from None
        cfg.weight = doc["weight"]
    analyses = doc.get("analyses", "all")
    if analyses == "all":
        analyses = list(ANALYSES)
    if not isinstance(analyses, list) or not analyses:
        raise ConfigError("analyses: at least one analysis is required")
    for a in analyses:
        if a not in ANALYSES:
            raise ConfigError(f"analyses: unknown analysis {a!r}")
    cfg.analyses = tuple(a for a in ANALYSES if a in analyses)
    taus = doc.get("taus", {})
    if "strategies" in taus:
        if not taus["strategies"] or any(s not in ("lexmin", "hash") for s in taus["strategies"]):
            raise ConfigError("taus.strategies: expected a non-empty subset of ['lexmin', 'hash']")
        cfg.strategies = tuple(taus["strategies"])
    if "seeds" in taus:
        if not isinstance(taus["seeds"], list) or not all(isinstance(s, int) for s in taus["seeds"]):
            raise ConfigError("taus.seeds: a list of integers is required")
        cfg.seeds = tuple(taus["seeds"])
    if "seed" in doc:
        if not isinstance(doc["seed"], int):
            raise ConfigError("seed: an integer is required")
        cfg.seed = doc["seed"]
    if "pairs" in doc.get("metrics", {}):
        cfg.pairs = _positive_int(doc["metrics"]["pairs"], "metrics.pairs")
    lip = doc.get("lipschitz", {})
    if "profile_depth" in lip:
        cfg.profile_depth = _positive_int(lip["profile_depth"], "lipschitz.profile_depth")
    if "base_depth" in lip:
        cfg.base_depth = _positive_int(lip["base_depth"], "lipschitz.base_depth")
    z = doc.get("zeta", {})
    if "N" in z:
        cfg.zeta_N = _positive_int(z["N"], "zeta.N")
    if "s" in z:
        cfg.zeta_s = parse_s_grid(z["s"], "zeta.s")
    if "k" in z:
        if not isinstance(z["k"], list) or not z["k"] or not all(isinstance(k, int) and k >= 0 for k in z["k"]):
            raise ConfigError("zeta.k: a non-empty list of natural numbers is required")
        cfg.zeta_k = tuple(z["k"])
    cfg.output = dict(doc.get("output", {}))
    return cfg


def parse_s_grid(value, key: str = "s") -> tuple[float, ...]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"{key}: empty s-grid")
    try:
        grid = tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: s values must be numbers") from None
    if any(s <= 0 for s in grid):
        raise ConfigError(f"{key}: s values must be positive")
    return grid


def load_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if not text.strip():
        return {}
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None


def build_oracle(subshift: dict, needed: int, headroom: int = 4) -> FactorOracle:
    """Certify the language to ``subshift.depth`` if given, else to ``headroom × needed``.

    The headroom leaves room for complete first returns of words near ``needed``.
    """
    doc = dict(subshift)
    if "depth" in doc:
        if isinstance(doc["depth"], int) and doc["depth"] < needed:
            raise UncertifiedDepth(needed, f"subshift.depth certifies only {doc['depth']}")
        return oracle_from_json(doc)
    return oracle_from_json(doc, headroom * needed)


def choice_functions(o: FactorOracle, cfg: AnalysisConfig):
    out = []
    if "lexmin" in cfg.strategies:
        out.append(choice_function(o))
    if "hash" in cfg.strategies:
        out.extend(choice_function(o, "hash", s) for s in cfg.seeds)
    return out


# -- JSON -------------------------------------------------------------------------


def jsonable(x):
    """Fractions become {"exact": "p/q", "float": x}; containers are converted recursively."""
    if isinstance(x, Fraction):
        return {"exact": str(x), "float": float(x)}
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def dumps(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def config_hash(doc: dict) -> str:
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode()).hexdigest()


# -- analyses ---------------------------------------------------------------------


def structure_section(o: FactorOracle, cfg: AnalysisConfig) -> dict:
    D = cfg.depth
    recs = privileged_words(o, D)
    p_pr = [0] * (D + 1)
    histogram: dict[int, int] = {}
    for r in recs:
        p_pr[len(r.word)] += 1
        if r.complete:
            histogram[r.a_tilde] = histogram.get(r.a_tilde, 0) + 1
    rank = rank_profile(o, D)
    out = {
        "depth": D,
        "complexity": o.complexities(D),
        "right_special_counts": o.right_special_counts(D),
        "privileged_counts": p_pr,
        "palindromic_counts": [palindromic_complexity(o, n) for n in range(D + 1)],
        "privileged_tree": {
            "depth": D,
            "count": len(recs),
            "max_order": max(r.order for r in recs),
            "incomplete_returns": sum(1 for r in recs if not r.complete),
            "a_tilde_histogram": {str(a): c for a, c in sorted(histogram.items())},
        },
        "rank_profile": {
            "depth": D,
            "lengths": rank.lengths,
            "max_a_tilde": rank.max_a_tilde,
            "log_power_fits": {str(b): f for b, f in rank.fits.items()},
        },
    }
    if D >= 30:
        window = (max(1, D // 10), D)
        out["exponents"] = {which: exponent_estimate(o, which, window).as_dict() for which in ("beta", "beta_rs", "beta_pr")}
    return out


def balance_section(o: FactorOracle, cfg: AnalysisConfig) -> dict:
    v = is_right_special_balanced(o, cfg.depth)
    return {
        "depth": cfg.depth,
        "balanced": v.balanced,
        "checked": v.checked,
        "skipped": list(v.skipped),
        "counterexample": None if v.counterexample is None else {"u": v.counterexample[0], "S": list(v.counterexample[1])},
    }


def _trend_depths(depth: int) -> list[int]:
    return sorted({max(1, depth // 8), max(1, depth // 4), max(1, depth // 2), depth})


def powers_section(o: FactorOracle, cfg: AnalysisConfig) -> dict:
    trend = []
    for N in _trend_depths(cfg.depth):
        rep = repulsiveness_index(o, N)
        p, base = max_power(o, N)
        trend.append({"depth": N, "ell": rep.value, "ell_pair": [rep.short, rep.long], "max_power": p,
                      "max_power_base": base})
    p, base = max_power(o, cfg.depth)
    witness = None
    if p >= 2:
        try:
            w = power_witness(o, base, p)
            witness = {"power": format_power(base, p), "chain": list(w.chain), "stub": w.stub}
        except ValueError as exc:
            witness = {"power": format_power(base, p), "error": str(exc)}
    return {"depth": cfg.depth, "trend": trend, "power_witness": witness}


def metrics_section(o: FactorOracle, cfg: AnalysisConfig, weight) -> dict:
    D = cfg.depth
    ell = repulsiveness_index(o, D).value
    taus = choice_functions(o, cfg)
    rng = random.Random(cfg.seed)
    span = max(1, min(len(o.text) - D, 4096))
    samples, skipped = [], 0
    for _ in range(cfg.pairs):
        i, j = rng.randrange(span), rng.randrange(span)
        try:
            rep = metric_report(o, orbit_point(o, i), orbit_point(o, j), taus, weight, D, ell)
        except Indistinguishable:
            skipped += 1
            continue
        samples.append(rep.as_dict())
    return {
        "depth": D,
        "ell": ell,
        "taus": [t.name for t in taus],
        "pairs": samples,
        "indistinguishable_pairs": skipped,
        "sandwich_violations": sum(1 for s in samples if not s["sandwich_ok"]),
    }


def lipschitz_section(o: FactorOracle, cfg: AnalysisConfig, weight) -> dict:
    D = cfg.depth
    profile = lipschitz_profile(o, weight, D, sample_points(o, D, cfg.seeds))
    verdict = bounded_powers_verdict(o, weight, D, cfg.profile_depth, cfg.base_depth, cfg.seeds)
    return {
        "depth": D,
        "profile": profile.as_dict(),
        "verdict": {"verdict": verdict.verdict, "evidence": verdict.evidence},
    }


def _curve_points(N: int) -> list[int]:
    return sorted({int(round(x)) for x in np.geomspace(1, N, 24)} | {N})


def zeta_section(o: FactorOracle, cfg: AnalysisConfig, weight) -> dict:
    N = cfg.N
    rows, identities, curves = [], [], []
    for s in cfg.zeta_s:
        for family in ("zeta_k", "zeta_tilde_k"):
            for k in cfg.zeta_k:
                rows.append(zeta_partial(o, weight, family, k, s, N).as_row())
        for kind in KINDS:
            series, check = zeta_spectral(o, weight, kind, s, N)
            identities.append({"kind": kind, "s": s, "N": N, "zeta_D": check.zeta_D, "half_sum": check.half_sum,
                               "coefficients_equal": check.coefficients_equal, "ok": check.ok})
        z1 = zeta_partial(o, weight, "zeta_k", 1, s, N)
        cumulative = np.cumsum([c * float(weight(n)) ** s for n, c in enumerate(z1.coefficients)])
        points = _curve_points(N)
        curves.append({"family": "zeta_k", "k": 1, "s": s, "N": points, "partial_sum": [float(cumulative[n]) for n in points]})
    audit_report = inequality_audit(o, weight, cfg.zeta_s, N, ks=tuple(sorted(set(cfg.zeta_k) | {0})))
    return {
        "depth": N,
        "series": rows,
        "identities": identities,
        "inequalities": {"depth": N, "rows": audit_report.rows, "failures": audit_report.failures},
        "curves": curves,
    }


def run_analyses(cfg: AnalysisConfig) -> dict:
    """Run the analyses; without a pinned ``subshift.depth``, return searches that
    run out of certified language trigger a rerun with more headroom."""
    needed = cfg.depth + 1
    if "zeta" in cfg.analyses:
        needed = max(needed, cfg.N + 1)
    headroom = 4
    while True:
        o = build_oracle(cfg.subshift, needed, headroom)
        try:
            return _report(o, cfg)
        except ReturnBudgetExceeded:
            if "depth" in cfg.subshift or headroom >= MAX_HEADROOM:
                raise
            log.info("return search exceeded certified depth %d; retrying", o.certified_depth)
            headroom *= 2


def _report(o: FactorOracle, cfg: AnalysisConfig) -> dict:
    weight = weight_from_name(cfg.weight)
    sections: dict = {}
    if "structure" in cfg.analyses:
        sections["structure"] = structure_section(o, cfg)
    if "balance" in cfg.analyses:
        sections["balance"] = balance_section(o, cfg)
    if "powers" in cfg.analyses:
        sections["powers"] = powers_section(o, cfg)
    if "metrics" in cfg.analyses:
        sections["metrics"] = metrics_section(o, cfg, weight)
    if "lipschitz" in cfg.analyses:
        sections["lipschitz"] = lipschitz_section(o, cfg, weight)
    if "zeta" in cfg.analyses:
        sections["zeta"] = zeta_section(o, cfg, weight)
    verdicts = {}
    if "lipschitz" in sections:
        verdicts["bounded_powers"] = {"verdict": sections["lipschitz"]["verdict"]["verdict"],
                                      "evidence": "sections.lipschitz.verdict.evidence"}
    if "balance" in sections:
        verdicts["right_special_balanced"] = {"verdict": "balanced" if sections["balance"]["balanced"] else "unbalanced",
                                              "evidence": "sections.balance"}
    return {
        "provenance": {
            "config_sha256": config_hash(cfg.raw),
            "versions": {"subshift_lab": __version__, "numpy": np.__version__, "python": platform.python_version()},
            "certified_depth": o.certified_depth,
            "oracle": o.summary() | {"definition": {k: v for k, v in o.definition.items() if k != "text"}},
            "weight": audit(weight).as_dict() | {"name": weight.name},
        },
        "config": cfg.raw,
        "sections": sections,
        "verdicts": verdicts,
    }


# -- commands ---------------------------------------------------------------------


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_analyze(args) -> int:
    cfg = parse_config(load_config(args.config))
    report = run_analyses(cfg)
    _write(args.out or cfg.output.get("report"), dumps(report))
    figures = args.figures or cfg.output.get("figures")
    if figures:
        from . import figures as fig

        for path in fig.render(json.loads(dumps(report)), figures):
            log.info("wrote %s", path)
    inconclusive = any(v["verdict"] == "inconclusive" for v in report["verdicts"].values())
    return 2 if args.strict and inconclusive else 0


def _subshift_only(path: str) -> dict:
    doc = load_config(path)
    if not isinstance(doc, dict) or "subshift" not in doc:
        raise ConfigError("missing subshift spec")
    return doc


def cmd_graph(args) -> int:
    doc = _subshift_only(args.config)
    if args.depth < 0:
        raise ConfigError("--depth must be non-negative")
    o = build_oracle(doc["subshift"], args.depth + 1)
    weight = weight_from_name(doc.get("weight", "inverse"))
    strategy, _, seed = args.tau.partition(":")
    tau = choice_function(o, strategy, int(seed) if seed else None)
    g = build_approx_graph(tau, args.depth, check_kind(args.kind), weight)
    _write(args.out, to_dot(g))
    return 0


def cmd_zeta(args) -> int:
    doc = _subshift_only(args.config)
    grid = parse_s_grid(args.s)
    if args.N < 0:
        raise ConfigError("--N must be non-negative")
    weight = weight_from_name(doc.get("weight", "inverse"))
    o = build_oracle(doc["subshift"], args.N + 1)
    series, extra = [], []
    for s in grid:
        if args.identity_check:
            if args.family not in ("zeta_D", "zetaD", "zeta_D_tilde", "zetaD_tilde"):
                raise ConfigError("--identity-check applies to the zeta_D families")
            kind = "priv" if "tilde" in args.family else "rs"
            z, check = zeta_spectral(o, weight, kind, s, args.N)
            series.append(z)
            extra.append({"identity_ok": "true" if check.ok else "false"})
        else:
            series.append(zeta_partial(o, weight, args.family, args.k, s, args.N))
            extra.append({})
    _write(args.out, write_csv(series, extra))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subshift-lab", description="Privileged-word analyses of minimal subshifts.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run the configured analyses and write a JSON report")
    a.add_argument("config")
    a.add_argument("--strict", action="store_true", help="exit 2 when a verdict is inconclusive")
    a.add_argument("--out", help="report path (default: output.report, else stdout)")
    a.add_argument("--figures", help="directory for PNG figures")
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("graph", help="export a truncated approximation graph as DOT")
    g.add_argument("config")
    g.add_argument("--kind", choices=KINDS, default="priv")
    g.add_argument("--depth", type=int, required=True)
    g.add_argument("--tau", default="lexmin", help="lexmin or hash:<seed>")
    g.add_argument("--out")
    g.set_defaults(func=cmd_graph)

    z = sub.add_parser("zeta", help="zeta partial sums over an s-grid as CSV")
    z.add_argument("config")
    z.add_argument("--family", default="zeta_k")
    z.add_argument("--k", type=int, default=1)
    z.add_argument("--s", required=True, help="comma-separated s values")
    z.add_argument("--N", type=int, required=True)
    z.add_argument("--out")
    z.add_argument("--identity-check", action="store_true", help="add an identity_ok column (zeta_D families)")
    z.set_defaults(func=cmd_zeta)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, UncertifiedDepth, UncertifiedLength, ReturnBudgetExceeded, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

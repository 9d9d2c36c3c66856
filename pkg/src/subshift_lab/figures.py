"""PNG figures rendered from an analysis report (the JSON-ready dict built by the CLI)."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# no timestamps in PNG metadata, so reruns give identical files
_META = {"Software": None}


def _value(x):
    """Numbers in the report are floats or {"exact", "float"} pairs."""
    return x["float"] if isinstance(x, dict) else x


def _save(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_META)
    plt.close(fig)
    return path


def complexity_figure(structure: dict, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    n = list(range(len(structure["complexity"])))
    ax.plot(n, structure["complexity"], label="p(n)")
    ax.plot(n[: len(structure["right_special_counts"])], structure["right_special_counts"], label="right-special")
    ax.plot(n[: len(structure["privileged_counts"])], structure["privileged_counts"], label="privileged")
    ax.set_xlabel("length n")
    ax.set_ylabel("count")
    ax.set_title(f"factor counts (depth {structure['depth']})")
    ax.legend()
    return _save(fig, path)


def rank_figure(structure: dict, path: str) -> str:
    rank = structure["rank_profile"]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(rank["lengths"], rank["max_a_tilde"], where="post")
    ax.set_xscale("log")
    ax.set_xlabel("length n")
    ax.set_ylabel("max ã over privileged words of length ≤ n")
    ax.set_title("return branching")
    return _save(fig, path)


def lipschitz_figure(lipschitz: dict, path: str) -> str:
    evidence = lipschitz["verdict"]["evidence"]
    trend = evidence.get("profile_trend", [])
    fig, ax = plt.subplots(figsize=(6, 4))
    if trend:
        ax.plot([t["depth"] for t in trend], [_value(t["profile"]) for t in trend], "o-", label="profile")
        ax.set_xscale("log", base=2)
    bound = evidence.get("geometric_bound")
    if bound is not None:
        ax.axhline(_value(bound), color="tab:red", linestyle="--", label="geometric bound")
    ax.set_xlabel("truncation depth")
    ax.set_ylabel("max r(ξ, m)")
    ax.set_title(f"Lipschitz profile: {lipschitz['verdict']['verdict']}")
    ax.legend()
    return _save(fig, path)


def zeta_figure(zeta: dict, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    for curve in zeta["curves"]:
        ax.plot(curve["N"], curve["partial_sum"], label=f"{curve['family']} k={curve['k']} s={curve['s']:g}")
    ax.set_xscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel("partial sum")
    ax.set_title("zeta partial sums")
    ax.legend(fontsize="small")
    return _save(fig, path)


def render(report: dict, out_dir: str) -> list[str]:
    """Write one PNG per available section; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    sections = report["sections"]
    written = []
    if "structure" in sections:
        written.append(complexity_figure(sections["structure"], os.path.join(out_dir, "complexity.png")))
        written.append(rank_figure(sections["structure"], os.path.join(out_dir, "rank_profile.png")))
    if "lipschitz" in sections:
        written.append(lipschitz_figure(sections["lipschitz"], os.path.join(out_dir, "lipschitz_profile.png")))
    if "zeta" in sections:
        written.append(zeta_figure(sections["zeta"], os.path.join(out_dir, "zeta_partial_sums.png")))
    return written

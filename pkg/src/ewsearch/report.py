"""Demo scenarios: tables, CSV files and figures.

Each demo returns a JSON-ready dict.  With ``out_dir`` set it also writes
``<name>.csv``, ``<name>.json`` and ``<name>.png`` there.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .basis import build_basis
from .optimizer import OptConfig
from .separation import SolverConfig, target_from_state, wsep
from .states import (BELL_NAMES, expectation, pauli_product, ppt_check, werner)
from .witness import bell_inequality_check, bound_entangled_state, classify, tiles_upb, witness_from_upb

DEMOS = ("bell-sandwich", "werner-sweep", "tiles-upb")

_PARTIAL_T = [5, 10]  # σ1⊗σ1, σ2⊗σ2


def _figure():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _write(out_dir, name: str, rows: list[dict], summary: dict, draw) -> None:
    if out_dir is None:
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if rows:
        with open(out / f"{name}.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    (out / f"{name}.json").write_text(json.dumps(summary, indent=2, ensure_ascii=False) + "\n")
    plt = _figure()
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    draw(ax)
    fig.tight_layout()
    fig.savefig(out / f"{name}.png", dpi=120)
    plt.close(fig)


def bell_sandwich(cfg: OptConfig | None = None, out_dir=None) -> dict:
    """Sandwich thresholds of A_psi, A_phi and the four-inequality table on noisy Bell states."""
    cfg = cfg or OptConfig()
    s11, s22 = pauli_product(1, 1), pauli_product(2, 2)
    ops = {"A_psi": s11 - s22, "A_phi": s11 + s22}
    witnesses = {}
    for name, op in ops.items():
        w = classify(op, cfg)
        witnesses[name] = {"a_star": w.a_star, "b_star": w.b_star,
                           "handedness": w.handedness.value}
    rows = []
    for bell in BELL_NAMES:
        for p in (1.0, 0.6, 0.4):
            rho = werner(p, bell)
            e11, e22 = expectation(s11, rho), expectation(s22, rho)
            chk = bell_inequality_check(e11, e22)
            rows.append({"bell": bell, "p": p, "e11": round(e11, 12), "e22": round(e22, 12),
                         "e11+e22": round(e11 + e22, 12), "e11-e22": round(e11 - e22, 12),
                         "entangled": chk.entangled, "implicated": chk.bell or ""})
    summary = {"demo": "bell-sandwich", "witnesses": witnesses, "table": rows}

    def draw(ax):
        sq = np.array([[0.5, 0], [0, 0.5], [-0.5, 0], [0, -0.5], [0.5, 0]])
        ax.fill(sq[:, 0], sq[:, 1], color="0.85", label="separable projection")
        t = np.linspace(-1, 1, 2)
        for off in (0.5, -0.5):
            ax.plot(t, t - off, "--", color="0.4", lw=0.8)  # e11 - e22 = ±1/2
            ax.plot(t, -t + off, ":", color="0.4", lw=0.8)  # e11 + e22 = ±1/2
        ps = np.linspace(0, 1, 21)
        for bell in BELL_NAMES:
            pts = np.array([[expectation(s11, werner(p, bell)), expectation(s22, werner(p, bell))]
                            for p in ps])
            ax.plot(pts[:, 0], pts[:, 1], "o-", ms=3, label=bell)
        ax.set_xlim(-0.6, 0.6)
        ax.set_ylim(-0.6, 0.6)
        ax.set_aspect("equal")
        ax.set_xlabel("<σ1⊗σ1>")
        ax.set_ylabel("<σ2⊗σ2>")
        ax.legend(fontsize=7, loc="upper left")

    _write(out_dir, "bell_sandwich", rows, summary, draw)
    return summary


def werner_sweep(cfg: SolverConfig | None = None, delta: float = 0.005, out_dir=None) -> dict:
    """Detection of werner(p) from two observables and from full tomography."""
    cfg = cfg or SolverConfig()
    basis = build_basis(2, 2)
    rows = []
    for p in np.round(np.linspace(0, 1, 11), 10):
        rho = werner(float(p))
        ppt = ppt_check(rho)
        e11 = expectation(pauli_product(1, 1), rho)
        e22 = expectation(pauli_product(2, 2), rho)
        part = wsep(target_from_state(rho, _PARTIAL_T, delta, basis=basis), basis, cfg)
        full = wsep(target_from_state(rho, None, delta, basis=basis), basis, cfg)
        rows.append({"p": float(p), "ppt_min_eig": round(ppt.min_eigenvalue, 12),
                     "ppt": ppt.is_ppt, "bell_check": bell_inequality_check(e11, e22).entangled,
                     "partial": part.outcome, "full": full.outcome})

    def onset(key):
        hits = [r["p"] for r in rows if r[key] == "witness"]
        return min(hits) if hits else None

    summary = {"demo": "werner-sweep", "delta": delta, "rows": rows,
               "onset_partial": onset("partial"), "onset_full": onset("full")}

    def draw(ax):
        ps = [r["p"] for r in rows]
        ax.plot(ps, [r["ppt_min_eig"] for r in rows], "k.-", label="min eig of partial transpose")
        ax.step(ps, [0.3 if r["partial"] == "witness" else 0 for r in rows], where="mid",
                label="witness from σ1σ1, σ2σ2")
        ax.step(ps, [0.2 if r["full"] == "witness" else 0 for r in rows], where="mid",
                label="witness from all 15")
        ax.axvline(1 / 3, color="0.6", lw=0.8)
        ax.axvline(0.5, color="0.6", lw=0.8, ls="--")
        ax.set_xlabel("p")
        ax.legend(fontsize=7)

    _write(out_dir, "werner_sweep", rows, summary, draw)
    return summary


def tiles_demo(cfg: OptConfig | None = None, out_dir=None) -> dict:
    """Witness from the Tiles UPB detecting its PPT bound-entangled state."""
    cfg = (cfg or OptConfig()).escalated()
    upb = tiles_upb()
    w = witness_from_upb(upb, cfg=cfg)
    rho = bound_entangled_state(upb)
    value = expectation(w.op, rho)
    ppt = ppt_check(rho)
    detects = value < w.a_star
    summary = {"demo": "tiles-upb", "a_star": w.a_star, "b_star": w.b_star,
               "handedness": w.handedness.value, "expectation": value,
               "detects": bool(detects), "ppt": bool(ppt.is_ppt),
               "ppt_min_eig": ppt.min_eigenvalue,
               "message": ("witness detects; PPT passes" if detects and ppt.is_ppt
                           else "unexpected outcome")}
    eig = np.linalg.eigvalsh(w.op.matrix)
    rows = [{"quantity": k, "value": summary[k]}
            for k in ("a_star", "b_star", "expectation", "ppt_min_eig")]

    def draw(ax):
        ax.plot(range(len(eig)), eig, "ks", label="eigenvalues of A'")
        ax.axhline(w.a_star, color="C0", label="a*(A')")
        ax.axhline(w.b_star, color="C1", label="b*(A')")
        ax.axhline(value, color="C3", ls="--", label="<A'> on bound-entangled state")
        ax.set_xlabel("eigenvalue index")
        ax.legend(fontsize=7)

    _write(out_dir, "tiles_upb", rows, summary, draw)
    return summary


def format_report(summary: dict) -> str:
    name = summary["demo"]
    lines = [f"== {name} =="]
    if name == "bell-sandwich":
        for k, w in summary["witnesses"].items():
            lines.append(f"{k}: a* = {w['a_star']:+.6f}  b* = {w['b_star']:+.6f}  ({w['handedness']})")
        lines.append("bell   p     e11      e22      e11+e22  e11-e22  entangled  implicated")
        for r in summary["table"]:
            lines.append(f"{r['bell']:<6} {r['p']:<4}  {r['e11']:+.4f}  {r['e22']:+.4f}  "
                         f"{r['e11+e22']:+.4f}  {r['e11-e22']:+.4f}  {str(r['entangled']):<9}  "
                         f"{r['implicated']}")
    elif name == "werner-sweep":
        lines.append("p     ppt_min_eig  bell_check  partial   full")
        for r in summary["rows"]:
            lines.append(f"{r['p']:<4}  {r['ppt_min_eig']:+.5f}     {str(r['bell_check']):<10}  "
                         f"{r['partial']:<8}  {r['full']}")
        lines.append(f"detection onset: partial p = {summary['onset_partial']}, "
                     f"full p = {summary['onset_full']}")
    else:
        lines.append(f"a*(A') = {summary['a_star']:+.6f}  b*(A') = {summary['b_star']:+.6f}  "
                     f"({summary['handedness']})")
        lines.append(f"tr(A' rho_BE) = {summary['expectation']:+.6f}")
        lines.append(f"PPT: {summary['ppt']} (min eig {summary['ppt_min_eig']:+.3g})")
        lines.append(summary["message"])
    return "\n".join(lines)


def run_demo(name: str, cfg: SolverConfig | None = None, out_dir=None) -> dict:
    cfg = cfg or SolverConfig()
    if name == "bell-sandwich":
        return bell_sandwich(cfg.opt, out_dir)
    if name == "werner-sweep":
        return werner_sweep(cfg, out_dir=out_dir)
    if name == "tiles-upb":
        return tiles_demo(cfg.opt, out_dir)
    raise ValueError(f"unknown demo {name!r}; choose from {DEMOS}")

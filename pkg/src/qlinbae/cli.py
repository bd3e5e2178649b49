"""Command-line front end: system-spec parsing, analysis commands, and
report/CSV emission.

Spec files are JSON with keys modes, channels, S, C_minus, C_plus,
Omega_minus, Omega_plus; complex entries are two-element [re, im] arrays.
Optional sections: feedback (split, k11, k12, k21, k22, beamsplitter),
kalman (A_co, B_co, C_co or Gamma_q/Gamma_p), sim (fock_dim, dt, T,
n_traj, seed). Exit status: 0 success, 1 validation/precondition failure,
2 internal-consistency error.
"""

import argparse
import csv
import json
import sys as _sys

import numpy as np

from . import bae, feedback, kalman, qnd, smesim
from .errors import (InternalConsistencyError, PreconditionError,
                     QLinBAEError, ValidationError, WellPosednessError)
from .qsys import ac_realization, new_system, quad_realization, validation_report
from .xferfn import block_pattern, eval_tf, frequency_sweep

SCHEMA_VERSION = 1


# ---------------------------------------------------------------- encoding

def parse_complex_matrix(node, where):
    """Nested lists with scalar or [re, im] entries -> complex ndarray."""
    def entry(x):
        if isinstance(x, (int, float)):
            return complex(x)
        if (isinstance(x, list) and len(x) == 2
                and all(isinstance(v, (int, float)) for v in x)):
            return complex(x[0], x[1])
        raise ValueError(
            f"{where}: entries must be numbers or [re, im] pairs, got {x!r}")

    if not isinstance(node, list) or not node:
        raise ValueError(f"{where}: expected a non-empty matrix (list of rows)")
    rows = node if isinstance(node[0], list) and (
        not node[0] or isinstance(node[0][0], (list, int, float))) else [node]
    # a bare [re, im] pair is a 1x1 matrix
    if (len(node) == 2 and all(isinstance(v, (int, float)) for v in node)):
        return np.array([[entry(node)]])
    out = [[entry(x) for x in row] for row in rows]
    widths = {len(r) for r in out}
    if len(widths) != 1:
        raise ValueError(f"{where}: ragged rows {sorted(widths)}")
    return np.array(out, dtype=complex)


def emit_complex_matrix(mat):
    mat = np.atleast_2d(np.asarray(mat))
    return [[[float(np.real(x)), float(np.imag(x))] for x in row]
            for row in mat]


def load_spec(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    for key in ("modes", "channels", "S", "C_minus", "C_plus",
                "Omega_minus", "Omega_plus"):
        if key not in doc:
            raise ValueError(f"spec file {path}: missing key {key!r}")
    sys_obj = new_system(
        s=parse_complex_matrix(doc["S"], "S"),
        c_minus=parse_complex_matrix(doc["C_minus"], "C_minus"),
        c_plus=parse_complex_matrix(doc["C_plus"], "C_plus"),
        omega_minus=parse_complex_matrix(doc["Omega_minus"], "Omega_minus"),
        omega_plus=parse_complex_matrix(doc["Omega_plus"], "Omega_plus"),
    )
    if sys_obj.n_modes != doc["modes"] or sys_obj.m_channels != doc["channels"]:
        raise ValueError(
            f"spec file {path}: declared modes/channels "
            f"({doc['modes']}, {doc['channels']}) do not match matrix shapes "
            f"({sys_obj.n_modes}, {sys_obj.m_channels})")
    return sys_obj, doc


def emit_spec(sys_obj):
    return {
        "modes": sys_obj.n_modes,
        "channels": sys_obj.m_channels,
        "S": emit_complex_matrix(sys_obj.s),
        "C_minus": emit_complex_matrix(sys_obj.c_minus),
        "C_plus": emit_complex_matrix(sys_obj.c_plus),
        "Omega_minus": emit_complex_matrix(sys_obj.omega_minus),
        "Omega_plus": emit_complex_matrix(sys_obj.omega_plus),
    }


def _write_json(doc, out):
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    text = json.dumps(doc, indent=2)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_csv(header, rows, out):
    if out:
        fh = open(out, "w", encoding="utf-8", newline="")
    else:
        fh = _sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if out:
            fh.close()


# ---------------------------------------------------------------- commands

def cmd_validate(args):
    try:
        sys_obj, _ = load_spec(args.spec)
    except ValidationError as exc:
        _write_json({"valid": False, "violations": exc.violations,
                     "tolerance": args.tol}, args.out)
        return 1
    _, violations = validation_report(
        sys_obj.s, sys_obj.c_minus, sys_obj.c_plus,
        sys_obj.omega_minus, sys_obj.omega_plus, tol=args.tol)
    _write_json({"valid": not violations, "violations": violations,
                 "tolerance": args.tol}, args.out)
    return 0 if not violations else 1


def cmd_realize(args):
    sys_obj, _ = load_spec(args.spec)
    r = ac_realization(sys_obj) if args.form == "ac" else quad_realization(sys_obj)
    _write_json({"form": r.form,
                 "A": emit_complex_matrix(r.a), "B": emit_complex_matrix(r.b),
                 "C": emit_complex_matrix(r.c), "D": emit_complex_matrix(r.d)},
                args.out)
    return 0


def cmd_tf(args):
    sys_obj, _ = load_spec(args.spec)
    r = quad_realization(sys_obj)
    if args.sweep:
        wmin, wmax, npts = args.sweep
        omegas = np.logspace(np.log10(wmin), np.log10(wmax), int(npts))
        values = frequency_sweep(r, omegas)
        m = sys_obj.m_channels
        header = ["omega"] + [f"abs_G_{i}_{j}" for i in range(2 * m)
                              for j in range(2 * m)]
        rows = [[f"{w:.12g}"] + [f"{abs(values[k][i, j]):.12g}"
                                 for i in range(2 * m) for j in range(2 * m)]
                for k, w in enumerate(omegas)]
        _write_csv(header, rows, args.out)
    else:
        g = eval_tf(r, 1j * args.omega)
        _write_json({"omega": args.omega, "G": emit_complex_matrix(g)}, args.out)
    return 0


def cmd_bae(args):
    sys_obj, _ = load_spec(args.spec)
    report = bae.certify_bae(sys_obj, tol=args.tol)
    _write_json({
        "tolerance": args.tol,
        "certified_pairs": sorted(list(p) for p in report.certified_pairs),
        "matched_conditions": [
            {"id": m.condition_id,
             "hypotheses": m.hypotheses_checked,
             "predicted_pairs": sorted(list(p) for p in m.predicted_pairs)}
            for m in report.matched_conditions],
        "consistent": report.consistency,
        "block_certificates": {
            name: {"zero": cert.zero, "max_markov": cert.max_markov,
                   "max_freq": cert.max_freq}
            for name, cert in (("qq", report.pattern.qq), ("qp", report.pattern.qp),
                               ("pq", report.pattern.pq), ("pp", report.pattern.pp))},
    }, args.out)
    return 0


def cmd_qnd(args):
    sys_obj, _ = load_spec(args.spec)
    coeffs = qnd.commutator_coeffs(sys_obj)
    doc = {
        "tolerance": args.tol,
        "commutator_residual": float(coeffs.max_norm()),
        "qnd_interaction": qnd.is_qnd_interaction(sys_obj, tol=args.tol),
        "coupling": qnd.coupling_properties(sys_obj, tol=args.tol),
    }
    rep = qnd.qnd_variable_report(sys_obj, tol=args.tol)
    doc["qnd_variables"] = {
        "q_is_qnd": rep.q_is_qnd, "p_is_qnd": rep.p_is_qnd,
        "case_matched": rep.case_matched,
        "structural_rows_vanish": rep.structural_rows_vanish,
        "witnesses": [{"pair": w.pair_label, "rank": w.rank, "full": w.full}
                      for w in rep.witnesses],
    }
    if sys_obj.m_channels == 1:
        siso = qnd.siso_analysis(sys_obj, tol=args.tol)
        doc["siso"] = {"gain": siso.gain,
                       "which_quadrature": siso.which_quadrature,
                       "q_residual": siso.q_residual,
                       "p_residual": siso.p_residual}
    _write_json(doc, args.out)
    return 0


def _network_from_doc(sys_obj, doc):
    fb = doc.get("feedback")
    if fb is None:
        raise ValueError("spec file has no 'feedback' section")
    m1, m2 = fb["split"]
    return feedback.make_network(
        omega_minus=sys_obj.omega_minus, omega_plus=sys_obj.omega_plus,
        k11=parse_complex_matrix(fb["k11"], "feedback.k11"),
        k12=parse_complex_matrix(fb["k12"], "feedback.k12"),
        k21=parse_complex_matrix(fb["k21"], "feedback.k21"),
        k22=parse_complex_matrix(fb["k22"], "feedback.k22"),
        s_b=parse_complex_matrix(fb["beamsplitter"], "feedback.beamsplitter"),
    )


def cmd_feedback(args):
    sys_obj, doc = load_spec(args.spec)
    if args.action == "reduce":
        net = _network_from_doc(sys_obj, doc)
        reduced = feedback.reduce_network(net, tol=args.tol)
        check = feedback.verify_reduction(net, tol=args.tol)
        _write_json({
            "tolerance": args.tol,
            "reduced": emit_spec(reduced),
            "oracle_max_deviation": check.max_deviation,
            "oracle_passed": check.passed,
        }, args.out)
        return 0
    # design
    fb = doc.get("feedback", {})
    split = tuple(fb.get("split", (1, sys_obj.m_channels - 1)))
    cfg = feedback.SearchConfig(seed=args.seed)
    cands = feedback.design_couplings(sys_obj.omega_minus, sys_obj.omega_plus,
                                      split, search_cfg=cfg)
    _write_json({
        "n_candidates": len(cands),
        "candidates": [{
            "objective": c.objective,
            "k11": emit_complex_matrix(c.k11), "k12": emit_complex_matrix(c.k12),
            "k21": emit_complex_matrix(c.k21), "k22": emit_complex_matrix(c.k22),
            "beamsplitter": emit_complex_matrix(c.s_b),
            "certified_pairs": sorted(list(p) for p in c.report.certified_pairs),
        } for c in cands[: args.max_candidates]],
    }, args.out)
    return 0


def cmd_kalman(args):
    _, doc = load_spec(args.spec)
    sec = doc.get("kalman")
    if sec is None:
        raise ValueError("spec file has no 'kalman' section")
    if "Gamma_q" in sec:
        k = kalman.from_gamma(
            a_co=np.real(parse_complex_matrix(sec["A_co"], "kalman.A_co")),
            gamma_q=parse_complex_matrix(sec["Gamma_q"], "kalman.Gamma_q"),
            gamma_p=parse_complex_matrix(sec["Gamma_p"], "kalman.Gamma_p"))
    else:
        k = kalman.KalmanCoSubsystem(
            a_co=np.real(parse_complex_matrix(sec["A_co"], "kalman.A_co")),
            b_co=np.real(parse_complex_matrix(sec["B_co"], "kalman.B_co")),
            c_co=np.real(parse_complex_matrix(sec["C_co"], "kalman.C_co")))
    verdict = kalman.check_kalman_bae(k, tol=args.tol)
    markov = kalman.markov_identity_check(k, tol=args.tol)
    _write_json({"tolerance": args.tol, "theorem": verdict,
                 "markov_identity": markov}, args.out)
    return 0


def cmd_simulate(args):
    sys_obj, doc = load_spec(args.spec)
    sec = doc.get("sim", {})
    fock_dim = args.fock_dim or sec.get("fock_dim", 8)
    dt = args.dt or sec.get("dt", 1e-3)
    T = args.T or sec.get("T", 1.0)
    n_traj = args.traj or sec.get("n_traj", 500)
    seed = args.seed if args.seed is not None else sec.get("seed", 0)
    ops = smesim.build_truncated_operators(sys_obj, fock_dim)
    tracked = [(f"L{j}", 0.5 * (l + l.conj().T))
               for j, l in enumerate(ops.l_ops)]
    gs = np.zeros(ops.dim)
    gs[0] = 1.0
    rho0 = 0.5 * np.outer(gs, gs) + 0.5 * np.eye(ops.dim) / ops.dim
    batch = smesim.simulate_qsme(ops, rho0, dt, T, n_traj, seed, tracked,
                                 store_every=max(1, batch_stride(dt, T)))
    stats = smesim.martingale_stats(batch)
    header = ["time"] + [f"{e.name}_mean" for e in stats] + [
        f"{e.name}_se" for e in stats]
    rows = []
    for i, t in enumerate(batch.times):
        rows.append([f"{t:.12g}"]
                    + [f"{e.means[i]:.12g}" for e in stats]
                    + [f"{e.standard_errors[i]:.12g}" for e in stats])
    _write_csv(header, rows, args.out)
    summary = {e.name: {"drift": e.drift, "allowance": e.allowance,
                        "passed": e.passed} for e in stats}
    print(json.dumps({"martingale": summary}, indent=2), file=_sys.stderr)
    return 0


def batch_stride(dt, T):
    return max(1, int(round(T / dt)) // 100)


# ---------------------------------------------------------------- driver

def build_parser():
    p = argparse.ArgumentParser(
        prog="qlinbae",
        description="Analysis toolkit for linear quantum systems: "
                    "back-action-evasion certificates, QND checks, feedback "
                    "reduction, and trajectory simulation.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("spec", help="JSON system-spec file")
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--out", default=None, help="output file (default stdout)")

    sp = sub.add_parser("validate", help="check structural invariants")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("realize", help="emit a state-space realization")
    common(sp)
    sp.add_argument("--form", choices=("ac", "quad"), default="quad")
    sp.set_defaults(func=cmd_realize)

    sp = sub.add_parser("tf", help="transfer-function values or sweep CSV")
    common(sp)
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--sweep", nargs=3, type=float, default=None,
                    metavar=("WMIN", "WMAX", "NPTS"))
    sp.set_defaults(func=cmd_tf)

    sp = sub.add_parser("bae", help="certify zero transfer-quadrature pairs")
    common(sp)
    sp.set_defaults(func=cmd_bae)

    sp = sub.add_parser("qnd", help="interaction commutator analysis")
    common(sp)
    sp.set_defaults(func=cmd_qnd)

    sp = sub.add_parser("feedback", help="network reduction / coupling design")
    sp.add_argument("action", choices=("reduce", "design"))
    common(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-candidates", type=int, default=5)
    sp.set_defaults(func=cmd_feedback)

    sp = sub.add_parser("kalman", help="canonical-form zero-product criteria")
    common(sp)
    sp.set_defaults(func=cmd_kalman)

    sp = sub.add_parser("simulate", help="conditioned-state trajectories")
    common(sp)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--fock-dim", type=int, default=None)
    sp.add_argument("--dt", type=float, default=None)
    sp.add_argument("--T", type=float, default=None)
    sp.add_argument("--traj", type=int, default=None)
    sp.set_defaults(func=cmd_simulate)

    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InternalConsistencyError as exc:
        print(f"internal consistency error: {exc}", file=_sys.stderr)
        return 2
    except (ValidationError, PreconditionError, WellPosednessError,
            QLinBAEError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

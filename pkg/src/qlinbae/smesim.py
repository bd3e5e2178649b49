"""Finite-dimensional stochastic-master-equation trajectory simulation.

Operators are realized on a truncated Fock space; the conditioned density
operator is integrated by Euler-Maruyama with per-step positivity repair,
and ensemble statistics test the martingale structure of conditional
expectations under a measurement that commutes with the dynamics.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InstabilityError, PreconditionError, ResourceError

DIM_CAP = 4096
CLIP_FLOOR = -1e-8
REPAIR_BUDGET = 0.05


@dataclass(frozen=True)
class TruncatedOperators:
    fock_dim: int
    n_modes: int
    a_ops: tuple
    l_ops: tuple
    h: np.ndarray

    @property
    def dim(self):
        return self.h.shape[0]


def ladder(fock_dim):
    """Truncated annihilation operator: <k-1|a|k> = sqrt(k)."""
    return np.diag(np.sqrt(np.arange(1, fock_dim)), k=1).astype(complex)


def build_truncated_operators(sys, fock_dim):
    """Tensor-product ladder operators, coupling operators
    L_j = sum_k (C-)_{jk} a_k + (C+)_{jk} a_k^dag, and the quadratic
    Hamiltonian assembled from the Omega blocks (Hermitized)."""
    if fock_dim < 2:
        raise PreconditionError("fock_dim must be at least 2")
    n = sys.n_modes
    d = fock_dim ** n
    if d > DIM_CAP:
        raise ResourceError(
            f"truncated dimension {d} exceeds the cap {DIM_CAP}; "
            "reduce fock_dim or the mode count"
        )
    a1 = ladder(fock_dim)
    eye = np.eye(fock_dim, dtype=complex)
    a_ops = []
    for k in range(n):
        factors = [eye] * n
        factors[k] = a1
        op = factors[0]
        for f in factors[1:]:
            op = np.kron(op, f)
        a_ops.append(op)
    cm, cp = sys.c_minus, sys.c_plus
    l_ops = []
    for j in range(sys.m_channels):
        lj = np.zeros((d, d), dtype=complex)
        for k in range(n):
            lj += cm[j, k] * a_ops[k] + cp[j, k] * a_ops[k].conj().T
        l_ops.append(lj)
    om, op = sys.omega_minus, sys.omega_plus
    h = np.zeros((d, d), dtype=complex)
    for j in range(n):
        for k in range(n):
            adj = a_ops[j].conj().T
            h += 0.5 * (om[j, k] * adj @ a_ops[k]
                        + op[j, k] * adj @ a_ops[k].conj().T
                        + np.conj(op[j, k]) * a_ops[j] @ a_ops[k]
                        + np.conj(om[j, k]) * a_ops[j] @ a_ops[k].conj().T)
    h = 0.5 * (h + h.conj().T)
    return TruncatedOperators(fock_dim=fock_dim, n_modes=n,
                              a_ops=tuple(a_ops), l_ops=tuple(l_ops), h=h)


def spectral_projections(l_hermitian, tol=1e-9):
    """Spectral decomposition of a Hermitian measurement operator with
    eigenvalues clustered within tol; returns [(eigenvalue, projector)]."""
    l = np.asarray(l_hermitian, dtype=complex)
    scale = max(np.abs(l).max(), 1.0)
    if np.abs(l - l.conj().T).max() > tol * scale:
        raise PreconditionError("spectral_projections requires a Hermitian operator")
    w, v = np.linalg.eigh(l)
    out = []
    i = 0
    while i < len(w):
        j = i + 1
        while j < len(w) and w[j] - w[i] <= tol * scale:
            j += 1
        vec = v[:, i:j]
        out.append((float(np.mean(w[i:j])), vec @ vec.conj().T))
        i = j
    return out


@dataclass(frozen=True)
class SMETrajectoryBatch:
    times: np.ndarray            # stored grid (n_times,)
    tracked_names: tuple
    tracked_values: np.ndarray   # (n_traj, n_times, n_tracked), real parts
    tracked_norms: tuple         # operator norms, for bias allowances
    seed: int
    dt: float
    n_steps: int
    final_states: np.ndarray     # (n_traj, d, d)
    max_trace_deviation: float
    max_repair_mass: float


def _lindblad_drift(rho, h, l_ops, ldl):
    out = -1j * (h @ rho - rho @ h)
    for lj, ljdlj in zip(l_ops, ldl):
        out += lj @ rho @ lj.conj().T - 0.5 * (ljdlj @ rho + rho @ ljdlj)
    return out


def simulate_qsme(ops, rho0, dt, T, n_traj, seed, tracked, store_every=1,
                  repair_budget=REPAIR_BUDGET):
    """Euler-Maruyama integration of the diffusive conditioned-state
    equation
      drho = L*(rho) dt
           + sum_j (L_j rho + rho L_j^dag - Tr[rho (L_j + L_j^dag)] rho) dnu_j
    with innovation increments dnu_j ~ Normal(0, dt), independent per
    channel. Each step Hermitizes, clips eigenvalues below -1e-8 to zero
    (any single step needing more than repair_budget of repaired mass per
    trajectory aborts with an instability error) and renormalizes the
    trace. Trajectories use
    independent counter-based
    RNG streams derived from (seed, trajectory index), so results are
    reproducible and order-independent.

    tracked: list of (name, operator) pairs; Tr(rho X) is recorded on the
    stored grid (every store_every steps, endpoints included).
    """
    rho0 = np.asarray(rho0, dtype=complex)
    d = rho0.shape[0]
    tr0 = np.trace(rho0).real
    if abs(tr0 - 1.0) > 1e-8:
        raise PreconditionError(f"rho0 trace {tr0} is not 1")
    w0 = np.linalg.eigvalsh(0.5 * (rho0 + rho0.conj().T))
    if w0.min() < CLIP_FLOOR:
        raise PreconditionError("rho0 is not positive semidefinite")

    h = ops.h
    l_ops = [np.asarray(l, dtype=complex) for l in ops.l_ops]
    ldl = [l.conj().T @ l for l in l_ops]
    gen_scale = np.abs(h).max() + sum(np.abs(l).max() ** 2 for l in l_ops)
    if dt * gen_scale > 0.1:
        warnings.warn(
            f"dt * generator scale = {dt * gen_scale:.3f} > 0.1; "
            "the Euler-Maruyama bias may be large", stacklevel=2)

    n_steps = int(round(T / dt))
    m = len(l_ops)
    streams = [np.random.Generator(np.random.Philox(child))
               for child in np.random.SeedSequence(seed).spawn(n_traj)]
    noise = np.empty((n_traj, n_steps, m))
    for i, g in enumerate(streams):
        noise[i] = g.normal(0.0, np.sqrt(dt), size=(n_steps, m))

    names = tuple(name for name, _ in tracked)
    obs = [np.asarray(x, dtype=complex) for _, x in tracked]
    norms = tuple(float(np.linalg.norm(x, 2)) for x in obs)

    store_idx = list(range(0, n_steps + 1, store_every))
    if store_idx[-1] != n_steps:
        store_idx.append(n_steps)
    store_set = set(store_idx)
    times = np.array([i * dt for i in store_idx])
    values = np.empty((n_traj, len(store_idx), len(obs)))

    rho = np.broadcast_to(rho0, (n_traj, d, d)).copy()
    lsum = [l + l.conj().T for l in l_ops]
    max_trace_dev = 0.0
    repair = np.zeros(n_traj)

    def record(slot):
        for k, x in enumerate(obs):
            values[:, slot, k] = np.einsum("tij,ji->t", rho, x).real

    slot = 0
    record(slot)
    for step in range(n_steps):
        drho = _lindblad_drift(rho, h, l_ops, ldl) * dt
        for j in range(m):
            exp_j = np.einsum("tij,ji->t", rho, lsum[j]).real
            mj = (l_ops[j] @ rho + rho @ l_ops[j].conj().T
                  - exp_j[:, None, None] * rho)
            drho += mj * noise[:, step, j, None, None]
        rho = rho + drho
        rho = 0.5 * (rho + rho.conj().transpose(0, 2, 1))
        tr = np.einsum("tii->t", rho).real
        max_trace_dev = max(max_trace_dev, float(np.abs(tr - 1.0).max()))
        w, v = np.linalg.eigh(rho)
        bad = w < CLIP_FLOOR
        if bad.any():
            step_mass = np.where(bad, -w, 0.0).sum(axis=1)
            repair = np.maximum(repair, step_mass)
            if step_mass.max() > repair_budget:
                raise InstabilityError(
                    f"single-step positivity repair mass "
                    f"{step_mass.max():.3e} exceeds {repair_budget}; reduce dt")
            w = np.where(w < CLIP_FLOOR, 0.0, w)
            rho = np.einsum("tik,tk,tjk->tij", v, w, v.conj())
        tr = np.einsum("tii->t", rho).real
        rho /= tr[:, None, None]
        if step + 1 in store_set:
            slot += 1
            record(slot)

    return SMETrajectoryBatch(
        times=times, tracked_names=names, tracked_values=values,
        tracked_norms=norms, seed=seed, dt=dt, n_steps=n_steps,
        final_states=rho, max_trace_deviation=max_trace_dev,
        max_repair_mass=float(repair.max()))


@dataclass(frozen=True)
class MartingaleEntry:
    name: str
    means: np.ndarray
    standard_errors: np.ndarray
    drift: float
    allowance: float
    passed: bool


def martingale_stats(batch, names=None):
    """Ensemble mean and standard error of each tracked quantity on the
    stored grid; the drift (mean at the final time minus mean at time 0) is
    compared against 3 x (standard error + dt-proportional bias allowance).
    """
    if names is None:
        names = batch.tracked_names
    out = []
    n_traj = batch.tracked_values.shape[0]
    for name in names:
        k = batch.tracked_names.index(name)
        vals = batch.tracked_values[:, :, k]
        means = vals.mean(axis=0)
        ses = vals.std(axis=0, ddof=1) / np.sqrt(n_traj)
        drift = float(means[-1] - means[0])
        allowance = 3.0 * (float(ses[-1]) + batch.dt * batch.tracked_norms[k])
        out.append(MartingaleEntry(
            name=name, means=means, standard_errors=ses, drift=drift,
            allowance=allowance, passed=abs(drift) <= allowance))
    return out

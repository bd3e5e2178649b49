"""Back-action-evasion criteria for the controllable-and-observable
subsystem of a canonically decomposed quadrature model.

The module does not compute the canonical decomposition itself; callers
supply the pre-partitioned real matrices (A_co, B_co, C_co) or the complex
coupling blocks (Gamma_co_q, Gamma_co_p) from which the real matrices are
assembled.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .matcore import inf_norm, j_sym

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class KalmanCoSubsystem:
    """Controllable-and-observable block with quadrature partitions.

    a_co: 2r x 2r, b_co: 2r x 2m split columnwise [B_q | B_p],
    c_co: 2m x 2r split rowwise [C_q ; C_p]. gamma_q / gamma_p, when given,
    are the m x r complex coupling blocks with
    C_co = sqrt(2) [[Re gamma_q, Re gamma_p], [Im gamma_q, Im gamma_p]].
    """

    a_co: np.ndarray
    b_co: np.ndarray
    c_co: np.ndarray
    gamma_q: np.ndarray = None
    gamma_p: np.ndarray = None
    gamma_h_nonzero: bool = False

    def __post_init__(self):
        a = np.asarray(self.a_co, dtype=float)
        b = np.asarray(self.b_co, dtype=float)
        c = np.asarray(self.c_co, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2:
            raise DimensionError(f"a_co must be square with even size, got {a.shape}")
        if b.shape[0] != a.shape[0] or b.shape[1] % 2:
            raise DimensionError(
                f"b_co must be {a.shape[0]} x 2m, got {b.shape}"
            )
        if c.shape[1] != a.shape[0] or c.shape[0] != b.shape[1]:
            raise DimensionError(
                f"c_co must be {b.shape[1]} x {a.shape[0]}, got {c.shape}"
            )
        object.__setattr__(self, "a_co", a)
        object.__setattr__(self, "b_co", b)
        object.__setattr__(self, "c_co", c)

    @property
    def m(self):
        return self.b_co.shape[1] // 2

    @property
    def c_q(self):
        return self.c_co[: self.m, :]

    @property
    def c_p(self):
        return self.c_co[self.m:, :]

    @property
    def b_q(self):
        return self.b_co[:, : self.m]

    @property
    def b_p(self):
        return self.b_co[:, self.m:]


def c_from_gamma(gamma_q, gamma_p):
    """C_co = sqrt(2) [[Re gq, Re gp], [Im gq, Im gp]]."""
    gq = np.atleast_2d(np.asarray(gamma_q, dtype=complex))
    gp = np.atleast_2d(np.asarray(gamma_p, dtype=complex))
    top = np.hstack([np.real(gq), np.real(gp)])
    bot = np.hstack([np.imag(gq), np.imag(gp)])
    return np.sqrt(2.0) * np.vstack([top, bot])


def b_from_gamma(gamma_q, gamma_p):
    """Input matrix consistent with identity feedthrough: the quadrature
    image of minus the sharp-adjoint of the coupling, which works out to
    B_co = J_r C_co^T J_m with J the block-antisymmetric quadrature form."""
    c = c_from_gamma(gamma_q, gamma_p)
    r2, m2 = c.shape[1], c.shape[0]
    return j_sym(r2 // 2).real @ c.T @ j_sym(m2 // 2).real


def from_gamma(a_co, gamma_q, gamma_p, gamma_h_nonzero=False):
    """Assemble a KalmanCoSubsystem from complex coupling blocks."""
    c = c_from_gamma(gamma_q, gamma_p)
    b = b_from_gamma(gamma_q, gamma_p)
    return KalmanCoSubsystem(a_co=a_co, b_co=b, c_co=c,
                             gamma_q=np.atleast_2d(np.asarray(gamma_q, dtype=complex)),
                             gamma_p=np.atleast_2d(np.asarray(gamma_p, dtype=complex)),
                             gamma_h_nonzero=gamma_h_nonzero)


def check_kalman_bae(k, tol=DEFAULT_TOL):
    """Zero-product criteria for evading back action in each direction.

    q_wrt_p: the q outputs carry no p-input back action iff C_q B_p = 0.
    p_wrt_q: symmetric criterion C_p B_q = 0. When both hold and the complex
    coupling blocks are available, Re(gamma_q gamma_p^T) is symmetric; the
    report carries that check too.
    """
    scale = max(inf_norm(k.c_co) * inf_norm(k.b_co), 1.0)
    q_wrt_p = inf_norm(k.c_q @ k.b_p) <= tol * scale
    p_wrt_q = inf_norm(k.c_p @ k.b_q) <= tol * scale
    re_sym = None
    if k.gamma_q is not None and k.gamma_p is not None:
        prod = np.real(k.gamma_q @ k.gamma_p.T)
        gscale = max(inf_norm(k.gamma_q) * inf_norm(k.gamma_p), 1.0)
        re_sym = inf_norm(prod - prod.T) <= tol * gscale
    return {
        "q_wrt_p": bool(q_wrt_p),
        "p_wrt_q": bool(p_wrt_q),
        "re_gamma_product_symmetric": re_sym,
    }


def structural_premise_residual(k):
    """Residual of C_co A_co = (1/2) C_co B_co C_co, the co-subsystem image
    of a coupling that commutes with the Hamiltonian."""
    return float(inf_norm(k.c_co @ k.a_co - 0.5 * k.c_co @ k.b_co @ k.c_co))


def markov_identity_check(k, order=6, tol=DEFAULT_TOL):
    """Residual of C_co A_co^k B_co = (1/2^k)(C_co B_co)^{k+1} for
    k = 1..order. The identity follows from the structural premise
    C_co A_co = (1/2) C_co B_co C_co, whose own residual is reported so a
    premise failure is flagged rather than silently producing noise."""
    premise = structural_premise_residual(k)
    scale = max(inf_norm(k.c_co) * inf_norm(k.b_co), 1.0)
    cb = k.c_co @ k.b_co
    residual = 0.0
    a_pow = np.eye(k.a_co.shape[0])
    cb_pow = cb
    for kk in range(1, order + 1):
        a_pow = a_pow @ k.a_co
        cb_pow = cb_pow @ cb
        lhs = k.c_co @ a_pow @ k.b_co
        rhs = cb_pow / (2.0 ** kk)
        residual = max(residual, float(inf_norm(lhs - rhs)))
    return {
        "residual": residual,
        "premise_residual": premise,
        "premise_holds": premise <= tol * scale * max(inf_norm(k.a_co), 1.0),
    }


def first_condition_residual(c_h, a_h22, a_12, b_h, k):
    """Diagnostic residual of the companion constraint on the
    non-co blocks: C_h A_h22 + C_co J A_12^T + (1/2) C_co B_co J B_h^T."""
    c_h = np.atleast_2d(np.asarray(c_h, dtype=float))
    a_h22 = np.atleast_2d(np.asarray(a_h22, dtype=float))
    a_12 = np.atleast_2d(np.asarray(a_12, dtype=float))
    b_h = np.atleast_2d(np.asarray(b_h, dtype=float))
    jn = j_sym(k.a_co.shape[0] // 2).real
    jm = j_sym(k.m).real
    res = (c_h @ a_h22 + k.c_co @ jn @ a_12.T
           + 0.5 * k.c_co @ k.b_co @ jm @ b_h.T)
    return float(inf_norm(res))

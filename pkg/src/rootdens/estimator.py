"""Maximum-likelihood root density estimator.

The density is modelled as ``p(x) = |psi(x)|**2`` with
``psi(x) = sum_i c_i phi_i(x)`` over an orthonormal basis and
``sum_i |c_i|**2 = 1``.  Stationarity of the log-likelihood under that
constraint is the fixed-point condition

    c_i = (1/n) sum_k phi_i(x_k) / conj(psi(x_k))

which :func:`fit_root` solves by relaxed iteration from the ground state.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bases import BasisSpec, orthonormal_matrix, check_support

__all__ = [
    "FitOptions",
    "PsiCoefficients",
    "ZeroPsiAtDataPoint",
    "MaxItersExceeded",
    "psi_value",
    "density",
    "likelihood_map",
    "log_likelihood",
    "fit_root",
]


class ZeroPsiAtDataPoint(ArithmeticError):
    """The current psi-function vanishes (numerically) at a sample point."""

    def __init__(self, x, value):
        super().__init__(f"|psi({x:g})| = {value:.3e} below guard; data point sits in a node")
        self.x = x
        self.value = value


class MaxItersExceeded(RuntimeError):
    """Iteration budget exhausted; ``result`` holds the best iterate reached."""

    def __init__(self, result):
        super().__init__(
            f"no convergence after {result.n_iter} iterations (residual {result.residual:.3e})")
        self.result = result


@dataclass(frozen=True)
class FitOptions:
    alpha: float = 0.7
    max_iters: int = 2000
    tol: float = 1e-9
    guard_eps: float = 1e-12
    restarts: int = 0
    complex_start: bool = False
    seed: int = 0
    polish_below: float = 1e-2

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not self.tol > 0 or not self.guard_eps > 0:
            raise ValueError("tol and guard_eps must be positive")
        if self.restarts < 0:
            raise ValueError("restarts must be non-negative")


@dataclass(frozen=True, eq=False)
class PsiCoefficients:
    """Unit-norm complex coefficients of a psi-function in a basis.

    The global phase is fixed so that the largest-magnitude coefficient is
    real and non-negative.  Fit diagnostics (iterations, residual,
    log-likelihood) are carried along when the object comes from
    :func:`fit_root`.
    """

    basis: BasisSpec
    coeffs: np.ndarray
    n_iter: int = 0
    converged: bool = True
    residual: float = 0.0
    loglik: float = float("nan")
    history: tuple = field(default=(), repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.size != self.basis.size:
            raise ValueError(f"{c.size} coefficients for a basis of size {self.basis.size}")
        norm = np.sqrt(np.sum(np.abs(c) ** 2))
        if not norm > 0:
            raise ValueError("zero coefficient vector")
        if abs(norm - 1.0) > 8 * np.finfo(float).eps:
            c = c / norm
        c = _fix_gauge(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def psi(self, x):
        return psi_value(self, x)

    def pdf(self, x):
        return density(self, x)

    def to_dict(self):
        inter = np.column_stack([self.coeffs.real, self.coeffs.imag]).ravel()
        return {
            "basis": self.basis.to_dict(),
            "coeffs_re_im": [float(v) for v in inter],
            "n_iter": int(self.n_iter),
            "converged": bool(self.converged),
            "residual": float(self.residual),
            "loglik": float(self.loglik),
        }

    @classmethod
    def from_dict(cls, d):
        inter = np.asarray(d["coeffs_re_im"], dtype=float).reshape(-1, 2)
        extra = {k: d[k] for k in ("n_iter", "converged", "residual", "loglik") if k in d}
        return cls(BasisSpec.from_dict(d["basis"]), inter[:, 0] + 1j * inter[:, 1], **extra)


def _fix_gauge(c):
    k = np.argmax(np.abs(c))
    big = c[k]
    if big.imag == 0 and big.real > 0:
        return c.copy()
    out = c * (np.conj(big) / abs(big))
    out[k] = abs(big)
    return out


def _normalize(c):
    return c / np.sqrt(np.sum(np.abs(c) ** 2))


def psi_value(c, x):
    """psi(x) = sum_i c_i phi_i(x), in data units (Jacobian folded in)."""
    return orthonormal_matrix(c.basis, x) @ c.coeffs


def density(c, x):
    """|psi(x)|**2, a density (or pmf) in the units of ``x``."""
    return np.abs(psi_value(c, x)) ** 2


def _map(phi, c, guard_eps, x=None):
    psi = phi @ c
    mag = np.abs(psi)
    k = np.argmin(mag)
    if mag[k] < guard_eps:
        raise ZeroPsiAtDataPoint(float(x[k]) if x is not None else float(k), float(mag[k]))
    return phi.T @ (1.0 / np.conj(psi)) / phi.shape[0], psi


def likelihood_map(c, sample, guard_eps=1e-12):
    """Right-hand side ``R(c)`` of the likelihood equation.

    ``R_i(c) = (1/n) sum_k phi_i(x_k) / conj(psi(x_k))``; the ML solution is
    a fixed point ``R(c) = c``.
    """
    x = np.atleast_1d(np.asarray(sample, dtype=float))
    phi = orthonormal_matrix(c.basis, x)
    return _map(phi, c.coeffs, guard_eps, x)[0]


def log_likelihood(c, sample):
    """Sum of log densities over the sample."""
    p = density(c, np.atleast_1d(np.asarray(sample, dtype=float)))
    if np.any(p <= 0):
        raise ZeroPsiAtDataPoint(float(np.asarray(sample).ravel()[np.argmin(p)]), 0.0)
    return float(np.sum(np.log(p)))


def _loglik(psi):
    return float(np.sum(np.log(np.abs(psi) ** 2)))


def _ascent_step(phi, c, psi):
    # Saddle-free Newton step on l(c) = mean log|psi|^2 over the unit sphere.
    # In real coordinates v = (Re c, Im c) the gradient is 2 (Re R, Im R)
    # and the Hessian of the Lagrangian l - (|c|^2 - 1) is
    #     [[-2 Re B, 2 Im B], [2 Im B, 2 Re B]] - 2 I,   B = mean phi phi^T / psi^2.
    # It is restricted to the tangent space (orthogonal to c and, for
    # complex c, to the phase direction i c); eigenvalues enter through
    # their modulus so the step always ascends, and equals Newton's step
    # near a maximum.  Real psi keeps the step real.
    n, s = phi.shape
    ph = phi.real
    inv = 1.0 / psi
    G = ph.T @ inv / n
    B = (ph.T * inv ** 2) @ ph / n
    if np.all(psi.imag == 0) and np.all(c.imag == 0):
        grad = 2.0 * G.real
        H = -2.0 * B.real - 2.0 * np.eye(s)
        fixed = [c.real]
    else:
        grad = 2.0 * np.concatenate([G.real, -G.imag])
        H = np.block([[-2.0 * B.real, 2.0 * B.imag], [2.0 * B.imag, 2.0 * B.real]])
        H -= 2.0 * np.eye(2 * s)
        fixed = [np.concatenate([c.real, c.imag]), np.concatenate([-c.imag, c.real])]
    # orthonormal basis of the tangent space
    q = np.linalg.qr(np.column_stack(fixed + [np.eye(H.shape[0])]))[0]
    Q = q[:, len(fixed):H.shape[0]]
    lam, U = np.linalg.eigh(Q.T @ H @ Q)
    mod = np.maximum(np.abs(lam), 1e-10 * max(np.max(np.abs(lam)), 1.0))
    step = Q @ (U @ ((U.T @ (Q.T @ grad)) / mod))
    if step.size == s:
        return step.astype(complex)
    return step[:s] + 1j * step[s:]


def _iterate(phi, x, c, opts):
    # The relaxed step c + a (R(c) - c) is projected gradient ascent on the
    # Lagrangian.  A step is halved when the likelihood drops or when it
    # overshoots the line maximum (new ascent direction opposes the old one);
    # the second test stays reliable once likelihood changes sink below
    # round-off.  Close to a solution a damped saddle-free Newton step is
    # tried first, which removes the crawl along weakly curved directions.
    r, psi = _map(phi, c, opts.guard_eps, x)
    ll = _loglik(psi)
    history = [ll]
    slack = 64 * np.finfo(float).eps
    step = opts.alpha
    for it in range(1, opts.max_iters + 1):
        d = r - c
        res = float(np.max(np.abs(d)))
        if res <= opts.tol:
            return c, it, True, res, ll, history
        if res < opts.polish_below:
            delta = _ascent_step(phi, c, psi)
            accepted = False
            for _ in range(8):
                c_new = _normalize(c + delta)
                psi_new = phi @ c_new
                if np.min(np.abs(psi_new)) >= opts.guard_eps:
                    ll_new = _loglik(psi_new)
                    r_new = phi.T @ (1.0 / np.conj(psi_new)) / phi.shape[0]
                    noise = slack * abs(ll)
                    if ll_new >= ll - noise and (ll_new > ll + noise
                                                 or np.max(np.abs(r_new - c_new)) < res):
                        accepted = True
                        break
                delta = 0.5 * delta
            if accepted:
                c, r, ll, psi = c_new, r_new, ll_new, psi_new
                history.append(ll)
                continue
        while True:
            c_new = _normalize(c + step * d)
            psi_new = phi @ c_new
            if np.min(np.abs(psi_new)) >= opts.guard_eps:
                ll_new = _loglik(psi_new)
                r_new = phi.T @ (1.0 / np.conj(psi_new)) / phi.shape[0]
                ok = (ll_new >= ll - slack * abs(ll)
                      and np.vdot(d, r_new - c_new).real >= 0.0)
            else:
                ok = False
            if ok or step < 1e-10:
                break
            step *= 0.5
        if not ok:
            r_new, psi_new = _map(phi, c_new, opts.guard_eps, x)
            ll_new = _loglik(psi_new)
        c, r, ll, psi = c_new, r_new, ll_new, psi_new
        history.append(ll)
        step = min(opts.alpha, 1.25 * step)
    return c, opts.max_iters, False, float(np.max(np.abs(r - c))), ll, history


def _starts(s, opts):
    e0 = np.zeros(s, dtype=complex)
    e0[0] = 1.0
    if opts.complex_start and s > 1:
        e0[1:] = 0.1j
    yield _normalize(e0)
    rng = np.random.default_rng(opts.seed)
    for _ in range(opts.restarts):
        pert = 0.3 * rng.standard_normal(s)
        if opts.complex_start:
            pert = pert + 0.3j * rng.standard_normal(s)
        yield _normalize(e0 + pert)


def fit_root(sample, basis, opts=None):
    """Fit psi-function coefficients by maximum likelihood.

    Iterates ``c <- normalize((1 - alpha) c + alpha R(c))`` from the ground
    state until ``max |R(c) - c| <= tol``; once the residual is below
    ``polish_below`` damped Newton steps on the likelihood are taken
    whenever they raise the likelihood or shrink the residual
    (``polish_below=0`` disables them).  With ``complex_start`` the start
    carries a small imaginary component in the higher harmonics; otherwise
    real data stay in the real subspace.  With ``restarts > 0`` additional
    perturbed starts are run and the converged fit of highest likelihood is
    kept.

    Parameters
    ----------
    sample : array_like
        Data points inside the support of ``basis``.
    basis : BasisSpec
    opts : FitOptions, optional

    Returns
    -------
    PsiCoefficients

    Raises
    ------
    ZeroPsiAtDataPoint
        An iterate vanished at a data point.
    MaxItersExceeded
        No start converged; ``exc.result`` is the best iterate found.
    """
    opts = FitOptions() if opts is None else opts
    x = check_support(basis, np.atleast_1d(np.asarray(sample, dtype=float)))
    if x.size < basis.size:
        warnings.warn(f"sample size {x.size} below basis size {basis.size}", stacklevel=2)
    phi = orthonormal_matrix(basis, x).astype(complex)
    best = None
    for c0 in _starts(basis.size, opts):
        c, it, ok, res, ll, hist = _iterate(phi, x, c0, opts)
        cand = PsiCoefficients(basis, c, n_iter=it, converged=ok, residual=res,
                               loglik=ll, history=tuple(hist))
        if best is None or (ok, ll) > (best.converged, best.loglik):
            best = cand
    if not best.converged:
        raise MaxItersExceeded(best)
    return best

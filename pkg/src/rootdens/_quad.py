import numpy as np

_GL_CACHE = {}


def _gauss_legendre(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def composite_gauss_legendre(lower, upper, n_nodes=400, order=20):
    """Nodes and weights of a composite Gauss-Legendre rule on [lower, upper].

    The interval is split into ``ceil(n_nodes / order)`` equal panels, each
    carrying an ``order``-point rule.
    """
    if not (np.isfinite(lower) and np.isfinite(upper)) or upper <= lower:
        raise ValueError(f"invalid quadrature bounds ({lower}, {upper})")
    n_panels = max(1, -(-int(n_nodes) // order))
    edges = np.linspace(lower, upper, n_panels + 1)
    return panel_rule(edges, order)


def panel_rule(edges, order=8):
    """Gauss-Legendre rule on consecutive panels given by sorted ``edges``."""
    t, w = _gauss_legendre(order)
    edges = np.asarray(edges, dtype=float)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights

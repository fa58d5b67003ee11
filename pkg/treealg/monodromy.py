import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import factorial

import numpy as np
import sympy
from scipy.integrate import solve_ivp
from scipy.optimize import linear_sum_assignment

from treealg import settings
from treealg.connalg import Connection, is_flat, zeros
from treealg.errors import NotFlatError, PoleProximityError, VariableMismatchError
from treealg.ratfield import RatFunc

'''
Numerical face of the connections: parallel transport along piecewise linear
paths in the configuration space, residues along the diagonals and a
pole-order check along random rational lines.

Transport integrates Y'(s) = TRANSPORT_SIGN * A(s) Y(s), Y(0) = Id, with
A(s) = sum_i E_i(z(s)) dz_i/ds on every segment, by the Dormand-Prince pair
of scipy's RK45. With the sign -1 the columns of Y are parallel sections.
'''

logger = logging.getLogger(__name__)


class Path():
    '''
    Piecewise linear path through waypoints of C^n.
    @points: sequence of points, each a sequence of n complex coordinates
    '''

    def __init__(self, points):
        self.points = [np.asarray(p, dtype=complex) for p in points]
        if len(self.points) < 2:
            raise ValueError("a path needs at least two waypoints")
        n = self.points[0].shape[0]
        if any(p.shape != (n,) for p in self.points):
            raise VariableMismatchError("waypoints with different numbers of coordinates")
        for k, (a, b) in enumerate(self.segments()):
            if np.array_equal(a, b):
                raise ValueError(f"waypoints {k} and {k + 1} coincide")

    @property
    def n(self):
        return self.points[0].shape[0]

    @property
    def is_closed(self):
        return np.allclose(self.points[0], self.points[-1], rtol=0, atol=1e-14)

    def segments(self):
        return list(zip(self.points[:-1], self.points[1:]))

    def reversed(self):
        return Path(self.points[::-1])

    def __add__(self, other):
        "Concatenation: self first, then other"
        if not np.allclose(self.points[-1], other.points[0], rtol=0, atol=1e-14):
            raise ValueError("paths do not meet")
        return Path(self.points + other.points[1:])

    def min_diagonal_distance(self):
        "Smallest |z_i - z_j| reached along the path, with the segment where it happens"
        best, where = np.inf, None
        for k, (a, b) in enumerate(self.segments()):
            for i in range(self.n):
                for j in range(i + 1, self.n):
                    distance = segment_distance(a[i] - a[j], b[i] - b[j])
                    if distance < best:
                        best, where = distance, k
        return best, where


def segment_distance(w0, w1):
    "Minimum of |w0 + s (w1 - w0)| for s in [0, 1]"
    dw = w1 - w0
    if dw == 0:
        return abs(w0)
    s = min(1.0, max(0.0, -(np.conj(dw) * w0).real / abs(dw) ** 2))
    return abs(w0 + s * dw)


def circle_loop(base, i, j, vertices=settings.LOOP_VERTICES, radius_fraction=settings.LOOP_RADIUS_FRACTION, turns=1):
    '''
    Loop moving z_i counterclockwise around z_j, the other points fixed.
    The radius is radius_fraction times the distance from z_j to the nearest
    other point; the loop starts and ends on the circle, in the direction of base[i].
    '''
    base = np.asarray(base, dtype=complex)
    others = [abs(base[k] - base[j]) for k in range(len(base)) if k not in (i, j)]
    radius = float(radius_fraction) * min(others or [abs(base[i] - base[j])])
    start = np.angle(base[i] - base[j])
    points = []
    for step in range(vertices * turns + 1):
        point = base.copy()
        point[i] = base[j] + radius * np.exp(1j * (start + 2 * np.pi * step / vertices))
        points.append(point)
    points[-1] = points[0].copy()
    return Path(points)


def homotopic_perturbation(path, scale, seed=settings.DEFAULT_SEED):
    "The same path with its interior waypoints moved by complex offsets of size at most scale"
    rng = np.random.default_rng(seed)
    points = [p.copy() for p in path.points]
    for p in points[1:-1]:
        p += scale * (rng.uniform(-1, 1, p.shape) + 1j * rng.uniform(-1, 1, p.shape)) / np.sqrt(2)
    return Path(points)


class MonodromyResult():
    '''
    @matrix: complex transport matrix
    @step_count: accepted integrator steps over all segments
    @error_estimate: difference with a run at a tenth of the tolerance, 0 when not requested
    '''

    def __init__(self, matrix, step_count, error_estimate=0.0):
        self.matrix = matrix
        self.step_count = step_count
        self.error_estimate = error_estimate

    @property
    def eigenvalues(self):
        return np.linalg.eigvals(self.matrix)


class _Evaluator():
    "Complex evaluation of the connection matrices with the zero entries skipped"

    def __init__(self, conn):
        self.conn = conn
        self.entries = [[(index, f) for index, f in np.ndenumerate(m) if f] for m in conn]

    def __call__(self, point, velocity):
        total = np.zeros((self.conn.rank, self.conn.rank), dtype=complex)
        for i, entries in enumerate(self.entries):
            if velocity[i] == 0:
                continue
            for index, f in entries:
                total[index] += f.eval(point) * velocity[i]
        return total


def _transport_once(conn, path, tol):
    rank = conn.rank
    evaluate = _Evaluator(conn)
    total = np.eye(rank, dtype=complex)
    steps = 0
    for k, (a, b) in enumerate(path.segments()):
        velocity = b - a

        def rhs(s, y):
            return settings.TRANSPORT_SIGN * (evaluate(a + s * velocity, velocity) @ y.reshape(rank, rank)).ravel()

        solution = solve_ivp(rhs, (0.0, 1.0), np.eye(rank, dtype=complex).ravel(), method="RK45",
                             rtol=tol, atol=tol)
        if solution.status == -1:
            raise PoleProximityError(f"integration failed on segment {k}: {solution.message}", segment=k)
        steps += len(solution.t) - 1
        total = solution.y[:, -1].reshape(rank, rank) @ total
    return total, steps


def transport(conn, path, tol=1e-10, pole_distance=settings.POLE_DISTANCE, estimate_error=True):
    '''
    Transport matrix of conn along path, from the first waypoint to the last.
    @tol: relative and absolute tolerance of every integration step
    @pole_distance: smallest allowed distance of the path to a diagonal
    '''
    if path.n != conn.n_vars:
        raise VariableMismatchError(f"path in C^{path.n} for a connection on {conn.n_vars} points")
    distance, segment = path.min_diagonal_distance()
    if distance < pole_distance:
        raise PoleProximityError(f"segment {segment} comes within {distance:.3g} of a diagonal", segment=segment)
    matrix, steps = _transport_once(conn, path, tol)
    error = 0.0
    if estimate_error:
        refined, _ = _transport_once(conn, path, tol / 10)
        error = float(np.max(np.abs(refined - matrix))) if conn.rank else 0.0
    logger.debug("transport over %d segments: %d steps, error estimate %.3g", len(path.segments()), steps, error)
    return MonodromyResult(matrix, steps, error)


def residue(conn, pair):
    '''
    Coefficient of (z_i - z_j)^-1 in E_i along the divisor z_i = z_j, as a
    matrix of functions of the remaining points.
    Return (matrix, highest pole order found).
    '''
    i, j = pair
    n = conn.n_vars
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise VariableMismatchError(f"no diagonal {pair} for {n} points")
    key = (min(i, j), max(i, j))
    images = [RatFunc.variable(n, j if k == i else k) for k in range(n)]
    matrix = zeros(conn.rank, conn.rank, n)
    order = 0
    for index, f in np.ndenumerate(conn[i]):
        p = f.den.get(key, 0)
        order = max(order, p)
        if not p:
            continue
        g = f * RatFunc.diagonal(n, i, j, p)
        for _ in range(p - 1):
            g = g.partial(i)
        matrix[index] = g.subst(images) * Fraction(1, factorial(p - 1))
    return matrix, order


_calibration = {}


def calibrated_sign(tol=1e-10):
    '''
    Sign s with monodromy eigenvalues exp(2 pi i s sigma) for residue eigenvalues
    sigma, read off one abelian run with residue 1/3.
    '''
    if tol not in _calibration:
        reference = Connection.abelian(2, {(0, 1): Fraction(1, 3)})
        value = transport(reference, circle_loop([1, 0], 0, 1), tol=tol, estimate_error=False).matrix[0, 0]
        plus = abs(value - np.exp(2j * np.pi / 3))
        minus = abs(value - np.exp(-2j * np.pi / 3))
        _calibration[tol] = 1 if plus < minus else -1
        logger.debug("transport sign calibrated to %d", _calibration[tol])
    return _calibration[tol]


class ResidueComparison():
    '''
    : eigenvalues of the transport around the loop
    : exp(2 pi i s sigma) for the residue eigenvalues sigma, None when unsupported
    : (observed, predicted) index pairs of the optimal matching
    : calibrated transport sign
    : the raw monodromy matrix
    '''

    def __init__(self, monodromy, predicted, pairs, sign, matrix=None):
        self.monodromy = monodromy
        self.predicted = predicted
        self.pairs = pairs
        self.sign = sign
        self.matrix = matrix

    
    def supported(self):
        return self.predicted is not None

    
    def max_mismatch(self):
        if not self.supported:
            return None
        if not self.pairs:
            return 0.0
        return max(abs(self.monodromy[a] - self.predicted[b]) for a, b in self.pairs)


def monodromy_vs_residue(conn, pair, base, tol=1e-12, turns=1):
    '''
    Compare the monodromy around z_i = z_j with the exponentials of the residue
    eigenvalues. Without a constant simple-pole residue only the raw monodromy
    is returned, with predicted set to None.
    '''
    matrix, order = residue(conn, pair)
    sign = calibrated_sign()
    result = transport(conn, circle_loop(base, pair[0], pair[1], turns=turns), tol=tol, estimate_error=False)
    observed = result.eigenvalues
    if order > 1 or any(not f.is_constant for f in matrix.flat):
        logger.info("residue along %s has pole order %d or depends on the points; raw monodromy only", pair, order)
        return ResidueComparison(observed, None, [], sign, result.matrix)
    exact = sympy.Matrix(conn.rank, conn.rank, [sympy.Rational(f.constant_value.numerator, f.constant_value.denominator)
                                                for f in matrix.flat])
    sigmas = [complex(sympy.N(ev, 30)) for ev, mult in exact.eigenvals().items() for _ in range(mult)]
    predicted = np.exp(2j * np.pi * sign * turns * np.array(sigmas, dtype=complex))
    cost = np.abs(observed[:, None] - predicted[None, :])
    rows, cols = linear_sum_assignment(cost)
    return ResidueComparison(observed, predicted, list(zip(rows, cols)), sign, result.matrix)


class LineReport():
    '''
    Pole orders of one restricted connection.
    @finite: map from a linear factor of u (as text) to its pole order
    @infinity: pole order at u = infinity
    '''

    def __init__(self, a, b, finite, infinity):
        self.a = a
        self.b = b
        self.finite = finite
        self.infinity = infinity

    @property
    def max_order(self):
        return max([self.infinity] + list(self.finite.values()))


class RegularityReport():
    def __init__(self, lines, seed):
        self.lines = lines
        self.seed = seed

    @property
    def passed(self):
        return all(line.max_order <= 1 for line in self.lines)

    @property
    def worst(self):
        return max(self.lines, key=lambda line: line.max_order) if self.lines else None


def _sample_line(rng, n):
    while True:
        a = [Fraction(int(x), int(d)) for x, d in zip(rng.integers(-9, 10, n), rng.integers(1, 5, n))]
        b = [Fraction(int(x), int(d)) for x, d in zip(rng.integers(-9, 10, n), rng.integers(1, 5, n))]
        if any(b) and all(a[i] != a[j] or b[i] != b[j] for i in range(n) for j in range(i + 1, n)):
            return a, b


def restricted_orders(conn, a, b):
    "Pole orders of the pulled back connection A(u) du along z = a + u b"
    u = sympy.Symbol("u")
    finite = {}
    infinity = 0
    for l in range(conn.rank):
        for k in range(conn.rank):
            numerator, denominator = sympy.Poly(0, u, domain=sympy.QQ), sympy.Poly(1, u, domain=sympy.QQ)
            for i in range(conn.n_vars):
                f = conn[i][l, k]
                if not f or not b[i]:
                    continue
                p, q = f.restrict_to_line(a, b, u)
                numerator = numerator * q + p * denominator * sympy.Rational(b[i].numerator, b[i].denominator)
                denominator = denominator * q
            if numerator.is_zero:
                continue
            common = numerator.gcd(denominator)
            numerator, denominator = numerator.exquo(common), denominator.exquo(common)
            for factor, multiplicity in denominator.factor_list()[1]:
                name = str(factor.as_expr())
                finite[name] = max(finite.get(name, 0), multiplicity)
            infinity = max(infinity, numerator.degree() - denominator.degree() + 2)
    return finite, infinity


def regularity_probe(conn, lines=settings.DEFAULT_LINES, seed=settings.DEFAULT_SEED):
    '''
    Restrict conn to pseudo-random rational lines and record the pole orders of
    the restriction at every finite point and at infinity; the check passes
    when no order exceeds 1.
    '''
    if not (is_flat(conn, "standard")[0] or is_flat(conn, "half")[0]):
        raise NotFlatError(f"{conn} is not flat")
    rng = np.random.default_rng(seed)
    samples = [_sample_line(rng, conn.n_vars) for _ in range(lines)]

    def examine(sample):
        a, b = sample
        return LineReport(a, b, *restricted_orders(conn, a, b))

    with ThreadPoolExecutor(max_workers=settings.thread_count()) as pool:
        reports = list(pool.map(examine, samples))
    logger.info("regularity check over %d lines: worst order %d", lines,
                max((r.max_order for r in reports), default=0))
    return RegularityReport(reports, seed)


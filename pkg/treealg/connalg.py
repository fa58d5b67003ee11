import logging
from fractions import Fraction
from itertools import product

import numpy as np
import sympy

from treealg import settings
from treealg.cooperad import TruncMatrix, cocompose
from treealg.errors import (NotFlatError, NotInvariantError, NotInvertibleError, ShapeMismatchError,
                            UndefinedDegreeError, UnsupportedSubstitutionError, VariableMismatchError)
from treealg.ratfield import RatFunc

'''
Homogeneous connections on free graded M(n)-modules.

A Connection over M(n) on the free module with basis phi_0, ..., phi_{r-1}
is given by matrices E_0, ..., E_{n-1} with columns as images:
    nabla(sum_k a_k phi_k) = sum_k da_k phi_k + sum_{i,k,l} a_k (E_i)_{lk} phi_l dz_i
so parallel sections satisfy d_i a = -E_i a. Matrices are numpy object grids
of RatFunc.
'''

logger = logging.getLogger(__name__)


# matrices over M(n)

def zeros(rows, cols, n_vars):
    grid = np.empty((rows, cols), dtype=object)
    for index in np.ndindex(rows, cols):
        grid[index] = RatFunc.zero(n_vars)
    return grid


def identity(rank, n_vars):
    grid = zeros(rank, rank, n_vars)
    for k in range(rank):
        grid[k, k] = RatFunc.constant(n_vars, 1)
    return grid


def lift(matrix, n_vars):
    "Copy of matrix with every constant entry turned into a RatFunc over n_vars variables"
    matrix = np.array(matrix, dtype=object)
    if matrix.size == 0:
        return zeros(0, 0, n_vars)
    grid = np.empty(matrix.shape, dtype=object)
    for index, entry in np.ndenumerate(matrix):
        if isinstance(entry, RatFunc):
            if entry.n_vars != n_vars:
                raise VariableMismatchError(f"entry {index} has {entry.n_vars} variables, expected {n_vars}")
            grid[index] = entry
        else:
            grid[index] = RatFunc.constant(n_vars, Fraction(entry))
    return grid


def mat_mul(a, b, n_vars):
    "Product of object matrices, skipping zero entries"
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatchError(f"cannot multiply {a.shape} by {b.shape}")
    result = zeros(a.shape[0], b.shape[1], n_vars)
    for (i, k), row in np.ndenumerate(a):
        if not row:
            continue
        for j in range(b.shape[1]):
            if b[k, j]:
                result[i, j] = result[i, j] + row * b[k, j]
    return result


def mat_partial(a, i):
    grid = np.empty(a.shape, dtype=object)
    for index, entry in np.ndenumerate(a):
        grid[index] = entry.partial(i)
    return grid


def is_zero_matrix(a):
    return not any(bool(entry) for entry in a.flat)


def first_nonzero(a):
    for index, entry in np.ndenumerate(a):
        if entry:
            return index, entry
    return None


def kron(a, b, n_vars):
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    result = zeros(rows, cols, n_vars)
    for (i, j), x in np.ndenumerate(a):
        if not x:
            continue
        for (k, l), y in np.ndenumerate(b):
            if y:
                result[i * b.shape[0] + k, j * b.shape[1] + l] = x * y
    return result


def trace(a, n_vars):
    total = RatFunc.zero(n_vars)
    for k in range(a.shape[0]):
        total = total + a[k, k]
    return total


def determinant_adjugate(a, n_vars):
    '''
    Faddeev-LeVerrier recursion over M(n); only divisions by integers occur.
    Return (det a, adj a).
    '''
    rank = a.shape[0]
    if rank == 0:
        return RatFunc.constant(n_vars, 1), zeros(0, 0, n_vars)
    unit = identity(rank, n_vars)
    m = zeros(rank, rank, n_vars)
    c = RatFunc.constant(n_vars, 1)
    for k in range(1, rank + 1):
        m = mat_mul(a, m, n_vars) + unit * c
        c = trace(mat_mul(a, m, n_vars), n_vars) * Fraction(-1, k)
    sign = -1 if rank % 2 else 1
    return c * sign, m * (-sign)


def mat_inverse(a, n_vars):
    "Inverse over M(n); the determinant has to be a unit"
    det, adjugate = determinant_adjugate(a, n_vars)
    try:
        inverse = det.inverse()
    except UnsupportedSubstitutionError:
        raise NotInvertibleError(f"determinant {det} is not a unit of M({n_vars})") from None
    return adjugate * inverse


def to_sympy(matrix):
    return sympy.Matrix([[sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in row] for row in matrix])


def from_sympy(matrix):
    return np.array([[Fraction(int(x.p), int(x.q)) for x in matrix.row(i)] for i in range(matrix.rows)], dtype=object).reshape(matrix.shape)


class Connection():
    '''
    Connection on the free graded M(n)-module with a chosen basis.
    @n_vars: number of points n
    @rank: rank r of the module
    @matrices: E_0..E_{n-1}, each r x r, entries RatFunc or exact constants
    @basis_degrees: degrees of the basis elements (exact rationals), default 0
    '''

    def __init__(self, n_vars, rank, matrices, basis_degrees=None):
        self.n_vars = n_vars
        self.rank = rank
        matrices = list(matrices)
        if len(matrices) != n_vars:
            raise ShapeMismatchError(f"{len(matrices)} matrices for {n_vars} variables")
        self.matrices = []
        for i, matrix in enumerate(matrices):
            grid = lift(matrix, n_vars) if rank else zeros(0, 0, n_vars)
            if grid.shape != (rank, rank):
                raise ShapeMismatchError(f"E_{i} has shape {grid.shape}, expected {(rank, rank)}")
            self.matrices.append(grid)
        if basis_degrees is None:
            basis_degrees = [0] * rank
        if len(basis_degrees) != rank:
            raise ShapeMismatchError(f"{len(basis_degrees)} basis degrees for rank {rank}")
        self.basis_degrees = [Fraction(d) for d in basis_degrees]

    @classmethod
    def trivial(cls, n_vars, rank, basis_degrees=None):
        return cls(n_vars, rank, [zeros(rank, rank, n_vars) for _ in range(n_vars)], basis_degrees)

    @classmethod
    def abelian(cls, n_vars, coefficients):
        "Rank one connection sum a_ij dlog(z_i - z_j), coefficients a map (i, j) -> a_ij"
        matrices = [zeros(1, 1, n_vars) for _ in range(n_vars)]
        for (i, j), a in coefficients.items():
            term = RatFunc.diagonal(n_vars, i, j, -1) * Fraction(a)
            matrices[i][0, 0] = matrices[i][0, 0] + term
            matrices[j][0, 0] = matrices[j][0, 0] - term
        return cls(n_vars, 1, matrices)

    def __getitem__(self, i):
        return self.matrices[i]

    def __iter__(self):
        return iter(self.matrices)

    def __eq__(self, other):
        return (isinstance(other, Connection) and self.n_vars == other.n_vars and self.rank == other.rank
                and all(np.all(a == b) for a, b in zip(self.matrices, other.matrices)))

    def __add__(self, other):
        if (self.n_vars, self.rank) != (other.n_vars, other.rank):
            raise ShapeMismatchError("connections of different shapes")
        return Connection(self.n_vars, self.rank, [a + b for a, b in zip(self, other)], self.basis_degrees)

    def __sub__(self, other):
        if (self.n_vars, self.rank) != (other.n_vars, other.rank):
            raise ShapeMismatchError("connections of different shapes")
        return Connection(self.n_vars, self.rank, [a - b for a, b in zip(self, other)], self.basis_degrees)

    def homogeneity_defect(self):
        "First (i, l, k) whose entry does not have degree delta_k - delta_l - 1, or None"
        for i, matrix in enumerate(self.matrices):
            for (l, k), entry in np.ndenumerate(matrix):
                if not entry:
                    continue
                expected = self.basis_degrees[k] - self.basis_degrees[l] - 1
                if entry.degree is None or entry.degree != expected:
                    return i, l, k
        return None

    @property
    def is_homogeneous(self):
        return self.homogeneity_defect() is None

    def evaluate(self, i, point):
        "Complex value of E_i at a point"
        values = np.zeros((self.rank, self.rank), dtype=complex)
        for (l, k), entry in np.ndenumerate(self.matrices[i]):
            if entry:
                values[l, k] = entry.eval(point)
        return values

    def is_rational(self):
        "Every coefficient of every entry is an exact rational"
        return all(isinstance(c, Fraction) for m in self.matrices for e in m.flat for c in e.num.values())

    def __repr__(self):
        return f"Connection(n={self.n_vars}, rank={self.rank})"


class GaugeMap():
    '''
    Invertible r x r matrix over M(n), homogeneous of degree `degree`:
    entry (l, k) has degree delta_k + degree - delta_l for basis degrees delta.
    '''

    def __init__(self, matrix, degree=0, n_vars=None):
        matrix = np.array(matrix, dtype=object)
        if n_vars is None:
            n_vars = next(e.n_vars for e in matrix.flat if isinstance(e, RatFunc))
        self.n_vars = n_vars
        self.matrix = lift(matrix, n_vars)
        if self.matrix.shape[0] != self.matrix.shape[1]:
            raise ShapeMismatchError(f"gauge matrix of shape {self.matrix.shape} is not square")
        self.degree = Fraction(degree)
        self._inverse = None

    @property
    def rank(self):
        return self.matrix.shape[0]

    @classmethod
    def scalar(cls, n_vars, rank, f, degree=0):
        return cls(identity(rank, n_vars) * f, degree, n_vars)

    @property
    def determinant(self):
        return determinant_adjugate(self.matrix, self.n_vars)[0]

    @property
    def inverse_matrix(self):
        if self._inverse is None:
            self._inverse = mat_inverse(self.matrix, self.n_vars)
        return self._inverse

    def inverse(self):
        return GaugeMap(self.inverse_matrix, -self.degree, self.n_vars)

    def is_homogeneous(self, basis_degrees):
        for (l, k), entry in np.ndenumerate(self.matrix):
            if entry and entry.degree != basis_degrees[k] + self.degree - basis_degrees[l]:
                return False
        return True


def curvature(conn):
    '''
    Curl part C_ij = d_i E_j - d_j E_i and bracket part B_ij = [E_i, E_j], kept
    separate, for every i < j.
    Return a map (i, j) -> (C_ij, B_ij).
    '''
    n, rank = conn.n_vars, conn.rank
    parts = {}
    for i in range(n):
        for j in range(i + 1, n):
            curl = mat_partial(conn[j], i) - mat_partial(conn[i], j) if rank else zeros(0, 0, n)
            bracket = mat_mul(conn[i], conn[j], n) - mat_mul(conn[j], conn[i], n) if rank else zeros(0, 0, n)
            parts[(i, j)] = (curl, bracket)
    return parts


def is_flat(conn, convention="half"):
    '''
    @convention: "half" (alias "paper") checks C_ij = -B_ij / 2, "standard" checks C_ij + B_ij = 0
    Return (flat, witness) where witness is None or ((i, j), nonzero residual).
    '''
    if convention not in settings.FLATNESS_BRACKET_SCALE:
        raise ValueError(f"unknown flatness convention {convention}")
    scale = settings.FLATNESS_BRACKET_SCALE[convention]
    for pair, (curl, bracket) in curvature(conn).items():
        residual = curl + bracket * scale if conn.rank else curl
        if not is_zero_matrix(residual):
            logger.debug("curvature of %s does not vanish at %s", conn, pair)
            return False, (pair, residual)
    return True, None


def conn_degree(conn, reference=None):
    '''
    Degree k with sum_i z_i (E_i - reference_i) = k Id, for a flat homogeneous
    connection. Return None when that sum is not a constant multiple of the identity.
    '''
    if reference is None:
        reference = Connection.trivial(conn.n_vars, conn.rank, conn.basis_degrees)
    if (reference.n_vars, reference.rank) != (conn.n_vars, conn.rank):
        raise ShapeMismatchError("connection and reference have different shapes")
    for candidate in (conn, reference):
        if not (is_flat(candidate, "half")[0] or is_flat(candidate, "standard")[0]):
            raise NotFlatError(f"{candidate} is not flat")
        if not candidate.is_homogeneous:
            raise UndefinedDegreeError(f"{candidate} is not homogeneous at {candidate.homogeneity_defect()}")
    if conn.rank == 0:
        return None
    n = conn.n_vars
    total = zeros(conn.rank, conn.rank, n)
    for i in range(n):
        total = total + (conn[i] - reference[i]) * RatFunc.variable(n, i)
    scalar = total[0, 0]
    if not scalar.is_constant:
        return None
    if not np.all(total == identity(conn.rank, n) * scalar):
        return None
    return scalar.constant_value


def gauge_transform(conn, g):
    "Matrices g^-1 E_i g + g^-1 d_i g, in the basis phi g of degrees shifted by deg g"
    if g.rank != conn.rank or g.n_vars != conn.n_vars:
        raise ShapeMismatchError(f"gauge of rank {g.rank} for {conn}")
    n = conn.n_vars
    inverse = g.inverse_matrix
    matrices = []
    for i in range(n):
        conjugated = mat_mul(mat_mul(inverse, conn[i], n), g.matrix, n)
        matrices.append(conjugated + mat_mul(inverse, mat_partial(g.matrix, i), n))
    return Connection(n, conn.rank, matrices, [d + g.degree for d in conn.basis_degrees])


def same_monodromy(conn, other, g):
    "Whether other - conn is exactly the gauge difference given by g"
    if (conn.n_vars, conn.rank) != (other.n_vars, other.rank):
        return False
    return gauge_transform(conn, g) == other


def tensor_conn(conns):
    '''
    E(v_1 x ... x v_n) = sum_c v_1 x ... x E(v_c) x ... x v_n over the
    juxtaposed variables of the factors; basis in itertools.product order.
    '''
    conns = list(conns)
    n = sum(c.n_vars for c in conns)
    ranks = [c.rank for c in conns]
    rank = int(np.prod(ranks)) if conns else 1
    matrices = []
    offset = 0
    for c, conn in enumerate(conns):
        before = int(np.prod(ranks[:c]))
        after = int(np.prod(ranks[c + 1:]))
        mapping = [offset + i for i in range(conn.n_vars)]
        for i in range(conn.n_vars):
            moved = np.empty(conn[i].shape, dtype=object)
            for index, entry in np.ndenumerate(conn[i]):
                moved[index] = entry.relabel(mapping, n)
            matrices.append(kron(kron(identity(before, n), moved, n), identity(after, n), n))
        offset += conn.n_vars
    degrees = [sum(combo, Fraction(0)) for combo in product(*(c.basis_degrees for c in conns))]
    return Connection(n, rank, matrices, degrees)


def direct_sum_conn(conns):
    conns = list(conns)
    n = conns[0].n_vars
    if any(c.n_vars != n for c in conns):
        raise VariableMismatchError("direct summands over different numbers of points")
    rank = sum(c.rank for c in conns)
    matrices = [zeros(rank, rank, n) for _ in range(n)]
    offset = 0
    for conn in conns:
        for i in range(n):
            matrices[i][offset:offset + conn.rank, offset:offset + conn.rank] = conn[i]
        offset += conn.rank
    return Connection(n, rank, matrices, [d for c in conns for d in c.basis_degrees])


def conjugate_conn(conn, change, basis_degrees=None):
    "P^-1 E_i P for a constant invertible change of basis P"
    p = to_sympy(change)
    if p.det() == 0:
        raise NotInvertibleError("singular change of basis")
    n = conn.n_vars
    forward = lift(change, n)
    backward = lift(from_sympy(p.inv()), n)
    matrices = [mat_mul(mat_mul(backward, m, n), forward, n) for m in conn]
    return Connection(n, conn.rank, matrices, basis_degrees or conn.basis_degrees)


def idempotent_restriction(conn, idempotent):
    '''
    Connection induced on the image of a constant idempotent e preserved by
    every E_i, in the basis given by the column space of e.
    '''
    e = to_sympy(idempotent)
    if e * e != e:
        raise NotInvariantError("the projector is not idempotent")
    columns = e.columnspace()
    n = conn.n_vars
    if not columns:
        return Connection.trivial(n, 0)
    b = sympy.Matrix.hstack(*columns)
    left = (b.T * b).inv() * b.T
    embed, project = lift(from_sympy(b), n), lift(from_sympy(left), n)
    matrices = []
    for i, m in enumerate(conn):
        restricted = mat_mul(mat_mul(project, m, n), embed, n)
        if not np.all(mat_mul(m, embed, n) == mat_mul(embed, restricted, n)):
            raise NotInvariantError(f"E_{i} does not preserve the image of the projector")
        matrices.append(restricted)
    degrees = [conn.basis_degrees[next(r for r in range(b.rows) if b[r, s] != 0)] for s in range(b.cols)]
    return Connection(n, b.cols, matrices, degrees)


class Coaugmentation():
    "Pushforward along M(n - i) -> M(n): variable k goes to coordinate positions[k]"

    def __init__(self, positions, n):
        self.positions = list(positions)
        self.n = n


class Permutation(Coaugmentation):
    "Pushforward along the relabeling z_k -> z_perm[k]"

    def __init__(self, perm):
        perm = list(perm)
        if sorted(perm) != list(range(len(perm))):
            raise VariableMismatchError(f"{perm} is not a permutation")
        super().__init__(perm, len(perm))


class StructureMap():
    "Pushforward along the co-operad structure map, truncated at order"

    def __init__(self, partition, order):
        self.partition = tuple(partition)
        self.order = order


class TruncConnection():
    '''
    Pushforward of a connection along the structure map: coefficient matrices of
    every dt_ij (inner variables, block order) and dz_i, with TruncTensor entries.
    '''

    def __init__(self, partition, order, rank, dt, dz, basis_degrees):
        self.partition = tuple(partition)
        self.order = order
        self.rank = rank
        self.dt = list(dt)
        self.dz = list(dz)
        self.basis_degrees = list(basis_degrees)

    @property
    def n_inner(self):
        return sum(self.partition)

    def coefficient(self, k):
        "Coefficient matrix of the k-th combined differential (dt first, then dz)"
        return self.dt[k] if k < self.n_inner else self.dz[k - self.n_inner]

    @property
    def coefficients(self):
        return self.dt + self.dz


def pushforward_conn(conn, target):
    "Transport of conn along a Coaugmentation, Permutation or StructureMap"
    n = conn.n_vars
    if isinstance(target, Coaugmentation):
        if len(target.positions) != n:
            raise VariableMismatchError(f"{len(target.positions)} positions for {n} variables")
        matrices = [zeros(conn.rank, conn.rank, target.n) for _ in range(target.n)]
        for i, matrix in enumerate(conn):
            moved = np.empty(matrix.shape, dtype=object)
            for index, entry in np.ndenumerate(matrix):
                moved[index] = entry.relabel(target.positions, target.n)
            matrices[target.positions[i]] = moved
        return Connection(target.n, conn.rank, matrices, conn.basis_degrees)

    if isinstance(target, StructureMap):
        if sum(target.partition) != n:
            raise VariableMismatchError(f"partition {target.partition} for {n} variables")
        cache = {}

        def push(entry):
            if entry not in cache:
                cache[entry] = cocompose(entry, target.partition, target.order).func
            return cache[entry]

        dt = []
        for matrix in conn:
            grid = np.empty(matrix.shape, dtype=object)
            for index, entry in np.ndenumerate(matrix):
                grid[index] = push(entry)
            dt.append(TruncMatrix(target.partition, target.order, grid))
        dz = []
        start = 0
        for size in target.partition:
            total = dt[start]
            for k in range(start + 1, start + size):
                total = total + dt[k]
            dz.append(total)
            start += size
        logger.debug("pushed %s along %s at order %d", conn, target.partition, target.order)
        return TruncConnection(target.partition, target.order, conn.rank, dt, dz, conn.basis_degrees)

    raise TypeError(f"cannot push a connection along {type(target).__name__}")


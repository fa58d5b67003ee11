import logging
from fractions import Fraction
from functools import reduce
from itertools import product

import numpy as np
import sympy

from treealg.axioms.data import (Decomposition, Module, PreTreeAlgebraData, TreeFunctorData, compositions,
                                 permutation_operator, split, swap)
from treealg.connalg import Connection, GaugeMap, conn_degree, from_sympy, lift, to_sympy, zeros
from treealg.errors import DegreeIdentityError, NotInvariantError, SingularLevelError
from treealg.liealg import casimir_eigenvalue, casimir_pair, eye, invariant_maps, sl2_rep
from treealg.ratfield import RatFunc

'''
Knizhnik-Zamolodchikov connections and the WZW tree functor built from them.

For irreducible representations L(l_1), ..., L(l_n) of a simple Lie algebra g at
level k, the connection matrices on L(l_1) x ... x L(l_n) x M(n) are
    E_l = -1/(k + h^v) sum_{p != l} Omega_lp / (z_l - z_p)
with Omega_lp the Killing-dual split Casimir in the slots l and p. On the
module of invariant maps Hom_g(L(l_1) x ... x L(l_n), L(l_inf)) the same formula
acts by precomposition, f -> f o Omega_lp.
'''

logger = logging.getLogger(__name__)


class MapBasis():
    "A linearly independent list of maps with exact coordinate extraction"

    def __init__(self, maps):
        self.maps = [np.array(m, dtype=object) for m in maps]
        if self.maps:
            self._columns = sympy.Matrix.hstack(*(to_sympy(m.reshape((-1, 1))) for m in self.maps))
            self._left = (self._columns.T * self._columns).inv() * self._columns.T

    def __len__(self):
        return len(self.maps)

    def __getitem__(self, a):
        return self.maps[a]

    def coordinates(self, f):
        "Exact coordinates of f in this basis; f has to lie in the span"
        if not self.maps:
            raise NotInvariantError("no basis to expand in")
        vector = to_sympy(np.array(f, dtype=object).reshape((-1, 1)))
        solution = self._left * vector
        if self._columns * solution != vector:
            raise NotInvariantError("the map does not lie in the span of the basis")
        return from_sympy(solution)[:, 0]

    def matrix_of(self, operator):
        "Matrix R of f -> f o operator, columns as images: f_a o operator = sum_b R[b, a] f_b"
        return np.array([self.coordinates(f @ operator) for f in self.maps], dtype=object).T.reshape(
            (len(self.maps), len(self.maps)))


def shifted_level(algebra, level):
    "k + h^v, which must not vanish"
    if algebra.h_dual is None:
        raise SingularLevelError(f"{algebra} carries no dual Coxeter number")
    kappa = Fraction(level) + algebra.h_dual
    if kappa == 0:
        raise SingularLevelError(f"level {level} is critical (k + h^v = 0)")
    return kappa


def kz_matrices(n, casimirs, kappa):
    "E_l = -1/kappa sum_{p != l} casimirs[(l, p)] / (z_l - z_p) as grids of RatFunc"
    assert n > 1, "the KZ sum is empty for a single point"
    rank = casimirs[(0, 1)].shape[0]
    matrices = []
    for l in range(n):
        grid = zeros(rank, rank, n)
        for p in range(n):
            if p != l:
                grid = grid + lift(casimirs[(l, p)], n) * (RatFunc.diagonal(n, l, p, -1) * (-1 / kappa))
        matrices.append(grid)
    return matrices


class KZData():
    '''
    @algebra: LieAlgebra
    @reps: the representations L(l_1), ..., L(l_n)
    @level: level k, with k + h^v != 0
    '''

    def __init__(self, algebra, reps, level):
        self.algebra = algebra
        self.reps = list(reps)
        self.level = Fraction(level)
        self.kappa = shifted_level(algebra, level)
        n = len(self.reps)
        self.casimirs = {(l, p): casimir_pair(self.reps, l, p) for l in range(n) for p in range(n) if l != p}
        dim = int(np.prod([r.dim for r in self.reps])) if self.reps else 1
        if n > 1:
            self.full = Connection(n, dim, kz_matrices(n, self.casimirs, self.kappa))
        else:
            self.full = Connection.trivial(n, dim)
        self.bases = {}
        self.restricted = {}

    @property
    def n(self):
        return len(self.reps)

    @property
    def weights(self):
        return [r.label for r in self.reps]

    def basis(self, target):
        if target.label not in self.bases:
            if self.n == 1 and target.label == self.reps[0].label:
                maps = [eye(target.dim)]
            else:
                maps = invariant_maps(self.reps, target)
            self.bases[target.label] = MapBasis(maps)
        return self.bases[target.label]


def kz_build(algebra, reps, level):
    kz = KZData(algebra, reps, level)
    logger.debug("KZ connection for weights %s at level %s: rank %d", kz.weights, level, kz.full.rank)
    return kz


def kz_restrict(kz, target):
    "Connection induced on the invariant maps into target, acting by precomposition"
    if target.label in kz.restricted:
        return kz.restricted[target.label]
    basis = kz.basis(target)
    n = kz.n
    rank = len(basis)
    if rank == 0 or n < 2:
        conn = Connection.trivial(n, rank)
    else:
        pieces = {pair: basis.matrix_of(omega) for pair, omega in kz.casimirs.items()}
        conn = Connection(n, rank, kz_matrices(n, pieces, kz.kappa))
    kz.restricted[target.label] = conn
    return conn


def alpha(algebra, rep, level):
    "Conformal shift C(lambda) / (2 (k + h^v)), kept exactly"
    return casimir_eigenvalue(rep) / (2 * shifted_level(algebra, level))


def kz_degree_identity(kz, target):
    '''
    Degree of the restricted connection against the trivial one, next to the
    value (sum_i C(l_i) - C(l_inf)) / (2 (k + h^v)) it has to take.
    Return (computed, predicted); raise DegreeIdentityError when they differ.
    '''
    conn = kz_restrict(kz, target)
    computed = conn_degree(conn)
    predicted = (sum(casimir_eigenvalue(r) for r in kz.reps) - casimir_eigenvalue(target)) / (2 * kz.kappa)
    if conn.rank and computed != predicted:
        raise DegreeIdentityError(f"degree {computed} of channel {target.label} differs from {predicted}")
    return computed, predicted


def kron_all(matrices, start=None):
    return reduce(np.kron, matrices, eye(1) if start is None else start)


class WZWBuilder():
    '''
    Assembles the WZW tree functor over sl_2 from highest weights (twice the spins).
    @algebra: sl_2 as a LieAlgebra
    @weights: base labels; the trivial label 0 is always added
    @level: level k
    @max_arity: largest number of inputs of a stored base tuple
    '''

    def __init__(self, algebra, weights, level, max_arity=3):
        assert algebra.cartan_type == ("A", 1), "the WZW builder works with sl_2 labels"
        self.algebra = algebra
        self.level = Fraction(level)
        self.kappa = shifted_level(algebra, level)
        self.max_arity = max_arity
        self.base = sorted(set(weights) | {0})
        self._reps = {}
        self._kz = {}
        self.labels = self._closure()

    def rep(self, m):
        if m not in self._reps:
            self._reps[m] = sl2_rep(self.algebra, m)
        return self._reps[m]

    def kz(self, inputs):
        inputs = tuple(inputs)
        if inputs not in self._kz:
            self._kz[inputs] = kz_build(self.algebra, [self.rep(m) for m in inputs], self.level)
        return self._kz[inputs]

    def channels(self, inputs):
        "Labels mu with Hom(L(inputs), L(mu)) != 0, by the Clebsch-Gordan range"
        candidates = range(sum(inputs) + 1)
        return [mu for mu in candidates if len(self.kz(inputs).basis(self.rep(mu)))]

    def _closure(self):
        labels = set(self.base)
        for arity in range(1, self.max_arity):
            for inputs in product(self.base, repeat=arity):
                labels.update(self.channels(inputs))
        return sorted(labels)

    def tuples(self):
        keys = set()
        for arity in range(self.max_arity + 1):
            for inputs in product(self.base, repeat=arity):
                keys.update((inputs, inf) for inf in self.labels)
        for arity in range(self.max_arity):
            for inputs in product(self.labels, repeat=arity):
                keys.update((inputs, inf) for inf in self.labels)
        return sorted(keys)

    def module(self, inputs, infinity):
        kz = self.kz(inputs)
        target = self.rep(infinity)
        return Module(inputs, infinity, kz_restrict(kz, target), kz.basis(target))

    def decomposition(self, data, key, partition):
        inputs, infinity = key
        big = data.module(inputs, infinity).basis
        blocks = split(inputs, partition)
        support = [mu for mu in product(self.labels, repeat=len(partition))
                   if data.rank(mu, infinity) and all(data.rank(b, m) for b, m in zip(blocks, mu))]
        columns = []
        for mu in support:
            inner = [data.module(b, m).basis for b, m in zip(blocks, mu)]
            outer = data.module(mu, infinity).basis
            for combo in product(*(range(len(b)) for b in inner), range(len(outer))):
                composed = outer[combo[-1]] @ kron_all([b[i] for b, i in zip(inner, combo)])
                columns.append(big.coordinates(composed))
        matrix = np.array(columns, dtype=object).T.reshape((len(big), len(columns)))
        return Decomposition(key, partition, support, matrix)

    def build(self):
        alpha_values = {m: alpha(self.algebra, self.rep(m), self.level) for m in self.labels}
        data = TreeFunctorData(self.labels, 0, alpha_values, metadata={
            "algebra": "sl2", "weights": self.base, "level": str(self.level), "max_arity": self.max_arity})
        for inputs, infinity in self.tuples():
            data.add(self.module(inputs, infinity))
        logger.info("WZW instance: %d labels, %d modules", len(self.labels), len(data.modules))

        for key, module in data.modules.items():
            inputs, infinity = key
            if not module.rank:
                continue
            if len(inputs) >= 2:
                # intermediate channels of non-base blocks may leave the label set
                if all(m in self.base for m in inputs):
                    partitions = compositions(len(inputs))
                else:
                    partitions = [(1,) * len(inputs)]
                for partition in partitions:
                    data.decompositions[(key, partition)] = self.decomposition(data, key, partition)
            for position, label in enumerate(inputs):
                if label == 0:
                    smaller = data.module(inputs[:position] + inputs[position + 1:], infinity)
                    u = np.array([module.basis.coordinates(f) for f in smaller.basis.maps], dtype=object)
                    u = u.T.reshape((module.rank, smaller.rank))
                    data.unit_gauges[(key, position)] = GaugeMap(u, 0, len(inputs)) if u.size else None
            dims = [self.rep(m).dim for m in inputs]
            for i in range(len(inputs) - 1):
                perm = swap(len(inputs), i)
                tau = permutation_operator(dims, perm)
                permuted = data.module(tuple(inputs[p] for p in perm), infinity)
                p = np.array([permuted.basis.coordinates(f @ tau) for f in module.basis.maps], dtype=object)
                data.permutations[(key, i)] = GaugeMap(p.T.reshape((module.rank, module.rank)), 0, len(inputs))
        return data


def wzw_instance(algebra, weights, level, max_arity=3):
    return WZWBuilder(algebra, weights, level, max_arity).build()


def wzw_algebra(data):
    '''
    Pre-tree algebra of a WZW instance: V_lambda is the lowest graded piece
    L(lambda) and phi sends each invariant map of the basis to itself.
    '''
    spaces = {m: m + 1 for m in data.labels}
    phi = {key: [np.array(f, dtype=object) for f in module.basis.maps] for key, module in data.modules.items()}
    return PreTreeAlgebraData(data, spaces, phi, window=1)


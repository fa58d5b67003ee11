import logging
from itertools import accumulate

import numpy as np

from treealg.errors import ExpansionNotNeededError, PartitionError, ShapeMismatchError
from treealg.ratfield import RatFunc

'''
The co-operad structure map of M: the substitution z_ij = t_ij + z_i followed
by expansion in increasing powers of the inner variables t.

Elements of the completed tensor product (M(m_1) x ... x M(m_n)) x^ M(n) are
stored as a single RatFunc over the juxtaposed variables
[t_00, ..., t_{n-1, m_{n-1}-1}, z_0, ..., z_{n-1}] (inner block variables
first, then the outer ones), cut at a total t-degree bound. Only same-block
differences t_ij - t_ij' and outer differences z_i - z_i' ever occur in
denominators, so the t-degree of a numerator monomial is well defined.
'''

logger = logging.getLogger(__name__)


def block_offsets(partition):
    "Index of the first inner variable of every block"
    return [0] + list(accumulate(partition))[:-1]


def _check_partition(partition):
    partition = tuple(partition)
    if not partition or any(m < 1 for m in partition):
        raise PartitionError(f"{partition} is not a partition into nonempty blocks")
    return partition


def range_shift(func, rng):
    "Total multiplicity of the denominator factors living inside the variable range rng"
    shift = 0
    for (i, j), m in func.den.items():
        inside_i, inside_j = i in rng, j in rng
        assert inside_i == inside_j, f"factor (z{i} - z{j}) straddles the graded range {rng}"
        if inside_i:
            shift += m
    return shift


def range_degrees(func, rng):
    "Degrees in the variables of rng carried by the numerator monomials of func"
    shift = range_shift(func, rng)
    return {sum(exps[k] for k in rng) - shift for exps in func.num}


def filter_degrees(func, bounds):
    '''
    Drop every numerator monomial whose degree in one of the ranges exceeds its bound.
    @func: RatFunc
    @bounds: list of (range of variable indices, inclusive upper bound)
    '''
    if func.is_zero or not bounds:
        return func
    shifts = [range_shift(func, rng) for rng, _ in bounds]
    num = {exps: c for exps, c in func.num.items()
           if all(sum(exps[k] for k in rng) - shift <= bound
                  for (rng, bound), shift in zip(bounds, shifts))}
    if len(num) == len(func.num):
        return func
    return RatFunc(func.n_vars, num, func.den)


def inverse_series(n_total, small_i, small_j, large_i, large_j, depth):
    "sum_{k <= depth} (-1)^k (s_i - s_j)^k (L_i - L_j)^(-k-1)"
    step = RatFunc.variable(n_total, small_i) - RatFunc.variable(n_total, small_j)
    power = RatFunc.constant(n_total, 1)
    result = RatFunc.zero(n_total)
    for k in range(depth + 1):
        result = result + power * RatFunc.diagonal(n_total, large_i, large_j, -k - 1) * (-1) ** k
        power = power * step
    return result


def expand_substitution(f, targets, n_total, small, order, bounds=()):
    '''
    Substitute z_k -> s_k + L_k and expand every inverse that mixes the two
    kinds of variables in increasing powers of the small ones.
    @f: RatFunc to transport
    @targets: one pair (small index or None, large index or None) per variable of f
    @n_total: variable count of the target ring
    @small: range of the variables the expansion is graded by
    @order: bound on the degree in the small variables
    @bounds: extra (range, bound) filters applied to the result

    Return the result as a RatFunc over n_total variables, exact up to degree
    order in the small variables.
    '''
    if len(targets) != f.n_vars:
        raise PartitionError(f"{len(targets)} targets for {f.n_vars} variables")
    images = []
    for k, (s, big) in enumerate(targets):
        if s is None and big is None:
            raise PartitionError(f"variable {k} has no image")
        image = RatFunc.zero(n_total)
        for index in (s, big):
            if index is not None:
                image = image + RatFunc.variable(n_total, index)
        images.append(image)

    exact = RatFunc.constant(n_total, 1)
    crossing = []
    shift = 0
    for (i, j), m in f.den.items():
        (si, bi), (sj, bj) = targets[i], targets[j]
        if bi == bj:
            if si == sj:
                raise PartitionError(f"z{i} and z{j} are sent to the same point")
            exact = exact * RatFunc.diagonal(n_total, si, sj, -m)
            if si in small:
                shift += m
        elif si == sj:
            exact = exact * RatFunc.diagonal(n_total, bi, bj, -m)
        elif bi is None or bj is None:
            raise PartitionError(f"z{i} - z{j} mixes an inner and an outer point")
        else:
            crossing.append((si, sj, bi, bj, m))

    depth = order + shift
    window = [(small, depth)]
    result = filter_degrees(RatFunc(f.n_vars, f.num).subst(images), window)
    for si, sj, bi, bj, m in crossing:
        series = inverse_series(n_total, si, sj, bi, bj, depth)
        for _ in range(m):
            result = filter_degrees(result * series, window)
    return filter_degrees(result * exact, [(small, order)] + list(bounds))


class TruncTensor():
    '''
    A truncated element of (M(m_1) x ... x M(m_n)) x^ M(n).
    @partition: block sizes (m_1, ..., m_n)
    @order: every stored monomial has total t-degree <= order
    @func: RatFunc over sum(m_i) + n variables, inner block variables first
    '''

    def __init__(self, partition, order, func):
        self.partition = _check_partition(partition)
        if order < 0:
            raise ValueError(f"negative truncation order {order}")
        self.order = order
        if func.n_vars != self.n_inner + len(self.partition):
            raise PartitionError(f"{func.n_vars} variables for the partition {self.partition}")
        self.func = filter_degrees(func, [(self.t_range, order)])

    @property
    def n_inner(self):
        return sum(self.partition)

    @property
    def n_outer(self):
        return len(self.partition)

    @property
    def n_vars(self):
        return self.n_inner + self.n_outer

    @property
    def t_range(self):
        return range(self.n_inner)

    def t_index(self, block, position):
        "Combined index of t_{block, position}"
        if not 0 <= position < self.partition[block]:
            raise PartitionError(f"block {block} has no position {position}")
        return block_offsets(self.partition)[block] + position

    def z_index(self, block):
        return self.n_inner + block

    @classmethod
    def zero(cls, partition, order):
        return cls(partition, order, RatFunc.zero(sum(partition) + len(partition)))

    @classmethod
    def one(cls, partition, order, c=1):
        return cls(partition, order, RatFunc.constant(sum(partition) + len(partition), c))

    @classmethod
    def from_outer(cls, partition, order, g):
        "1 x ... x 1 x g"
        n_inner = sum(partition)
        return cls(partition, order, g.relabel([n_inner + a for a in range(g.n_vars)], n_inner + len(partition)))

    @classmethod
    def from_inner(cls, partition, order, block, f):
        "f placed in the given block, 1 everywhere else"
        offset = block_offsets(partition)[block]
        return cls(partition, order, f.relabel([offset + k for k in range(f.n_vars)], sum(partition) + len(partition)))

    @property
    def is_zero(self):
        return self.func.is_zero

    @property
    def low_degree(self):
        "Smallest t-degree present, None for zero"
        degrees = range_degrees(self.func, self.t_range)
        return min(degrees) if degrees else None

    def t_degrees(self):
        return sorted(range_degrees(self.func, self.t_range))

    def _check(self, other):
        if not isinstance(other, TruncTensor):
            raise TypeError(f"cannot combine a TruncTensor with {type(other).__name__}")
        if other.partition != self.partition:
            raise PartitionError(f"partitions {self.partition} and {other.partition} differ")

    def truncate(self, order):
        assert order <= self.order, f"cannot raise the precision from {self.order} to {order}"
        return TruncTensor(self.partition, order, self.func)

    def __add__(self, other):
        self._check(other)
        return TruncTensor(self.partition, min(self.order, other.order), self.func + other.func)

    def __neg__(self):
        return TruncTensor(self.partition, self.order, -self.func)

    def __sub__(self, other):
        return self + (-other)

    def product_order(self, other):
        "Order up to which the product of self and other is exact"
        low_a = self.low_degree
        low_b = other.low_degree
        order = min(self.order, other.order)
        if low_a is not None and low_b is not None:
            order = min(order, self.order + low_b, other.order + low_a)
        return max(order, 0)

    def __mul__(self, other):
        if isinstance(other, (int, RatFunc)) or hasattr(other, "denominator"):
            return TruncTensor(self.partition, self.order, self.func * other)
        self._check(other)
        return TruncTensor(self.partition, self.product_order(other), self.func * other.func)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, TruncTensor) and self.partition == other.partition
                and self.order == other.order and self.func == other.func)

    def __hash__(self):
        return hash((self.partition, self.order, self.func))

    def agrees(self, other, order=None):
        "Equality after truncating both sides to a common order"
        self._check(other)
        common = min(self.order, other.order) if order is None else order
        return self.truncate(common).func == other.truncate(common).func

    def basic_terms(self):
        '''
        Split into basic tensors f_1 x ... x f_n x g.
        Return a list of (inner RatFuncs, outer RatFunc), one per distinct inner monomial.
        '''
        offsets = block_offsets(self.partition)
        inner_den = [dict() for _ in self.partition]
        outer_den = {}
        for (i, j), m in self.func.den.items():
            if i >= self.n_inner:
                outer_den[(i - self.n_inner, j - self.n_inner)] = m
                continue
            block = max(b for b, o in enumerate(offsets) if o <= i)
            inner_den[block][(i - offsets[block], j - offsets[block])] = m
        grouped = {}
        for exps, c in self.func.num.items():
            key = exps[:self.n_inner]
            grouped.setdefault(key, {})[exps[self.n_inner:]] = c
        terms = []
        for key, outer_num in sorted(grouped.items(), reverse=True):
            inner = [RatFunc(m, {key[o:o + m]: 1}, inner_den[b]) for b, (o, m) in enumerate(zip(offsets, self.partition))]
            terms.append((inner, RatFunc(self.n_outer, outer_num, outer_den)))
        return terms

    @classmethod
    def from_terms(cls, partition, order, terms):
        partition = _check_partition(partition)
        offsets = block_offsets(partition)
        n_inner = sum(partition)
        n_total = n_inner + len(partition)
        func = RatFunc.zero(n_total)
        for inner, outer in terms:
            if len(inner) != len(partition) or any(f.n_vars != m for f, m in zip(inner, partition)):
                raise PartitionError(f"inner factors do not match the partition {partition}")
            term = outer.relabel([n_inner + a for a in range(len(partition))], n_total)
            for f, o in zip(inner, offsets):
                term = term * f.relabel([o + k for k in range(f.n_vars)], n_total)
            func = func + term
        return cls(partition, order, func)

    def __repr__(self):
        return f"TruncTensor({self.partition}, order={self.order}, {self.func})"


def ts_add(a, b):
    return a + b


def ts_mul(a, b):
    return a * b


def ts_truncate(a, order):
    return a.truncate(order)


def expand_inverse(partition, left, right, order):
    '''
    Truncated expansion of (t_left + z_i - t_right - z_i')^-1.
    @left, right: (block, position) of the two inner points
    '''
    partition = _check_partition(partition)
    (block_i, pos_i), (block_j, pos_j) = left, right
    if block_i == block_j:
        raise ExpansionNotNeededError(f"both points lie in block {block_i}")
    x = TruncTensor.zero(partition, order)
    series = inverse_series(x.n_vars, x.t_index(block_i, pos_i), x.t_index(block_j, pos_j),
                            x.z_index(block_i), x.z_index(block_j), order)
    return TruncTensor(partition, order, series)


def structure_targets(partition):
    "Targets (t_ij, z_i) of the variables z_ij, in block order"
    n_inner = sum(partition)
    offsets = block_offsets(partition)
    return [(offsets[a] + j, n_inner + a) for a, m in enumerate(partition) for j in range(m)]


def cocompose(f, partition, order):
    "Image of f under the structure map, truncated at total t-degree order"
    partition = _check_partition(partition)
    if sum(partition) != f.n_vars:
        raise PartitionError(f"partition {partition} of {sum(partition)} points for {f.n_vars} variables")
    n_inner = sum(partition)
    func = expand_substitution(f, structure_targets(partition), n_inner + len(partition), range(n_inner), order)
    return TruncTensor(partition, order, func)


def coaugment(f, positions, n):
    "Send the variables of f to the chosen coordinates of M(n)"
    positions = list(positions)
    if len(set(positions)) != len(positions) or any(not 0 <= p < n for p in positions):
        raise PartitionError(f"positions {positions} do not select distinct coordinates of {n}")
    return f.relabel(positions, n)


def counit(x):
    "For a partition into singletons: the t-free part of x, read as an element of M(n)"
    if any(m != 1 for m in x.partition):
        raise PartitionError(f"counit needs singleton blocks, got {x.partition}")
    num = {exps[x.n_inner:]: c for exps, c in x.func.num.items() if not any(exps[:x.n_inner])}
    den = {(i - x.n_inner, j - x.n_inner): m for (i, j), m in x.func.den.items()}
    return RatFunc(x.n_outer, num, den)


def iterated_cocompose(f, partition, grouping, order, inner_first=True):
    '''
    One route of the coassociativity square for points split into the blocks
    of partition, the blocks themselves gathered in groups of sizes grouping.
    inner_first cocomposes along partition and then splits the outer points
    along grouping; otherwise the merged groups are cocomposed first and
    split afterwards.

    Return a RatFunc over [t (sum partition), s (len partition), w (len grouping)]
    keeping the terms of t-degree <= order and s-degree <= order.
    '''
    partition = _check_partition(partition)
    grouping = _check_partition(grouping)
    if sum(grouping) != len(partition):
        raise PartitionError(f"grouping {grouping} does not gather the {len(partition)} blocks")
    n_t, n_s, n_w = sum(partition), len(partition), len(grouping)
    n_total = n_t + n_s + n_w
    group_of = [a for a, k in enumerate(grouping) for _ in range(k)]
    t_range, s_range = range(n_t), range(n_t, n_t + n_s)

    if inner_first:
        first = cocompose(f, partition, order).func
        targets = [(k, None) for k in range(n_t)]
        targets += [(n_t + i, n_t + n_s + group_of[i]) for i in range(n_s)]
        return expand_substitution(first, targets, n_total, s_range, order, bounds=[(t_range, order)])

    merged = [sum(partition[i] for i in range(n_s) if group_of[i] == a) for a in range(n_w)]
    first = expand_substitution(f, structure_targets(merged), n_t + n_w, range(n_t), 2 * order)
    block_of = [i for i, m in enumerate(partition) for _ in range(m)]
    targets = [(k, n_t + block_of[k]) for k in range(n_t)]
    targets += [(None, n_t + n_s + a) for a in range(n_w)]
    return expand_substitution(first, targets, n_total, t_range, order, bounds=[(s_range, order)])


def check_coassociativity(f, partition, grouping, order):
    "Whether both routes of the coassociativity square agree up to order"
    inner = iterated_cocompose(f, partition, grouping, order, inner_first=True)
    outer = iterated_cocompose(f, partition, grouping, order, inner_first=False)
    logger.debug("coassociativity of %s over %s / %s at order %d: %s", f, partition, grouping, order, inner == outer)
    return inner == outer


class TruncMatrix():
    '''
    Square or rectangular matrix with TruncTensor entries sharing one partition
    and one truncation order; the entries are kept as RatFuncs over the
    combined variables in a numpy object grid.
    '''

    def __init__(self, partition, order, grid):
        self.partition = _check_partition(partition)
        self.order = order
        self.n_vars = sum(self.partition) + len(self.partition)
        t_range = range(sum(self.partition))
        grid = np.array(grid, dtype=object)
        assert grid.ndim == 2, "a TruncMatrix needs a two dimensional grid"
        self._grid = np.empty(grid.shape, dtype=object)
        for (i, j), f in np.ndenumerate(grid):
            if not isinstance(f, RatFunc):
                f = RatFunc.constant(self.n_vars, f)
            self._grid[i, j] = filter_degrees(f, [(t_range, order)])

    @property
    def shape(self):
        return self._grid.shape

    def __getitem__(self, index):
        return TruncTensor(self.partition, self.order, self._grid[index])

    def entry(self, i, j):
        return self._grid[i, j]

    @classmethod
    def from_constant(cls, partition, order, matrix):
        return cls(partition, order, np.array(matrix, dtype=object))

    @property
    def low_degree(self):
        degrees = set()
        t_range = range(sum(self.partition))
        for f in self._grid.flat:
            degrees |= range_degrees(f, t_range)
        return min(degrees) if degrees else None

    def truncate(self, order):
        assert order <= self.order, f"cannot raise the precision from {self.order} to {order}"
        return TruncMatrix(self.partition, order, self._grid)

    def _lift(self, other):
        if isinstance(other, TruncMatrix):
            if other.partition != self.partition:
                raise PartitionError(f"partitions {self.partition} and {other.partition} differ")
            return other
        return TruncMatrix(self.partition, self.order, np.array(other, dtype=object))

    def __add__(self, other):
        other = self._lift(other)
        if other.shape != self.shape:
            raise ShapeMismatchError(f"shapes {self.shape} and {other.shape}")
        return TruncMatrix(self.partition, min(self.order, other.order), self._grid + other._grid)

    def __neg__(self):
        return TruncMatrix(self.partition, self.order, -self._grid)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __matmul__(self, other):
        other = self._lift(other)
        if self.shape[1] != other.shape[0]:
            raise ShapeMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        order = min(self.order, other.order)
        low_a, low_b = self.low_degree, other.low_degree
        if low_a is not None and low_b is not None:
            order = max(0, min(order, self.order + low_b, other.order + low_a))
        rows, cols = self.shape[0], other.shape[1]
        grid = np.empty((rows, cols), dtype=object)
        for i in range(rows):
            for j in range(cols):
                total = RatFunc.zero(self.n_vars)
                for k in range(self.shape[1]):
                    a, b = self._grid[i, k], other._grid[k, j]
                    if a and b:
                        total = total + a * b
                grid[i, j] = total
        return TruncMatrix(self.partition, order, grid)

    def __rmatmul__(self, other):
        return self._lift(other) @ self

    def agrees(self, other, order=None):
        other = self._lift(other)
        common = min(self.order, other.order) if order is None else order
        return np.all(self.truncate(common)._grid == other.truncate(common)._grid)

    def first_difference(self, other, order=None):
        "First (i, j) where the truncations differ, with the difference, or None"
        other = self._lift(other)
        common = min(self.order, other.order) if order is None else order
        a, b = self.truncate(common), other.truncate(common)
        for (i, j), f in np.ndenumerate(a._grid):
            if f != b._grid[i, j]:
                return (i, j), f - b._grid[i, j]
        return None

import logging
from fractions import Fraction

import numpy as np
import sympy

from treealg.connalg import from_sympy, to_sympy
from treealg.errors import (IndexRangeError, NotALieAlgebraError, NotIrreducibleError,
                            NotSemisimpleError, ShapeMismatchError)

'''
Finite dimensional simple Lie algebras over exact rationals.

Structure constants c[i, j, k] give [x_i, x_j] = sum_k c[i, j, k] x_k. The
bilinear form is the Killing form K(x, y) = tr(ad x ad y); dual bases, Casimir
insertions and Casimir eigenvalues all use this normalization. Matrices are
numpy object arrays of Fraction; sympy does the exact linear solves.
'''

logger = logging.getLogger(__name__)

# dual Coxeter numbers of the classical and exceptional types
DUAL_COXETER = {
    "A": lambda r: r + 1,
    "B": lambda r: 2 * r - 1,
    "C": lambda r: r + 1,
    "D": lambda r: 2 * r - 2,
    "E": lambda r: {6: 12, 7: 18, 8: 30}[r],
    "F": lambda r: 9,
    "G": lambda r: 4,
}


def dual_coxeter(cartan_type, rank):
    "h^v for a Cartan type such as ('A', 1)"
    try:
        return Fraction(DUAL_COXETER[cartan_type](rank))
    except KeyError:
        raise NotSemisimpleError(f"no simple Lie algebra of type {cartan_type}{rank}") from None


def fraction_array(values):
    array = np.array(values, dtype=object)
    for index, x in np.ndenumerate(array):
        array[index] = Fraction(x)
    return array


def eye(dim):
    return fraction_array(np.eye(dim, dtype=int).astype(object))


def commutator(a, b):
    return a @ b - b @ a


class LieAlgebra():
    '''
    @structure_constants: d x d x d array, [x_i, x_j] = sum_k c[i, j, k] x_k
    @h_dual: dual Coxeter number; taken from the table when cartan_type is given
    @cartan_type: optional (letter, rank)
    @names: optional names of the basis vectors
    '''

    def __init__(self, structure_constants, h_dual=None, cartan_type=None, names=None):
        c = fraction_array(structure_constants)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise ShapeMismatchError(f"structure constants of shape {c.shape}")
        self.c = c
        self.dim = c.shape[0]
        self.names = list(names) if names else [f"x{i}" for i in range(self.dim)]
        self._check_bracket()

        # ad(x_i) maps x_j to sum_k c[i, j, k] x_k
        self.ad = [c[i].T.copy() for i in range(self.dim)]
        self.killing = fraction_array([[np.trace(a @ b) for b in self.ad] for a in self.ad])
        killing = to_sympy(self.killing)
        if killing.det() == 0:
            raise NotSemisimpleError("the Killing form is degenerate")
        self.killing_inverse = from_sympy(killing.inv())

        self.cartan_type = cartan_type
        if h_dual is None and cartan_type is not None:
            h_dual = dual_coxeter(*cartan_type)
        self.h_dual = None if h_dual is None else Fraction(h_dual)

    def _check_bracket(self):
        d, c = self.dim, self.c
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    if c[i, j, k] != -c[j, i, k]:
                        raise NotALieAlgebraError(f"[x{i}, x{j}] is not antisymmetric in component {k}")
        # Jacobi: [[x_i, x_j], x_l] + [[x_j, x_l], x_i] + [[x_l, x_i], x_j] = 0
        for i in range(d):
            for j in range(d):
                for l in range(d):
                    total = (np.tensordot(c[i, j], c[:, l], axes=1) + np.tensordot(c[j, l], c[:, i], axes=1)
                             + np.tensordot(c[l, i], c[:, j], axes=1))
                    if any(total):
                        raise NotALieAlgebraError(f"Jacobi identity fails on (x{i}, x{j}, x{l})")

    @property
    def dual_basis(self):
        "Row i holds the coordinates of g^i, with K(g^i, x_j) = delta_ij"
        return self.killing_inverse

    def bracket(self, x, y):
        "Bracket of two coordinate vectors"
        x, y = fraction_array(x), fraction_array(y)
        return np.tensordot(y, np.tensordot(x, self.c, axes=1), axes=1)

    @classmethod
    def from_structure_constants(cls, c, h_dual, names=None):
        return cls(c, h_dual=h_dual, names=names)

    def __repr__(self):
        if self.cartan_type:
            return f"LieAlgebra({self.cartan_type[0]}{self.cartan_type[1]})"
        return f"LieAlgebra(dim={self.dim})"


def sl2():
    "sl_2 in the basis (e, f, h) with [e, f] = h, [h, e] = 2e, [h, f] = -2f"
    c = np.zeros((3, 3, 3), dtype=int)
    e, f, h = range(3)
    c[e, f, h], c[f, e, h] = 1, -1
    c[h, e, e], c[e, h, e] = 2, -2
    c[h, f, f], c[f, h, f] = -2, 2
    return LieAlgebra(c, cartan_type=("A", 1), names=["e", "f", "h"])


class Rep():
    '''
    Representation of a Lie algebra by exact matrices.
    @algebra: LieAlgebra
    @matrices: rho(x_0), ..., rho(x_{d-1})
    @label: highest weight tag, for sl_2 twice the spin
    '''

    def __init__(self, algebra, matrices, label=None, check=True):
        self.algebra = algebra
        self.matrices = [fraction_array(m) for m in matrices]
        if len(self.matrices) != algebra.dim:
            raise ShapeMismatchError(f"{len(self.matrices)} matrices for an algebra of dimension {algebra.dim}")
        self.dim = self.matrices[0].shape[0]
        if any(m.shape != (self.dim, self.dim) for m in self.matrices):
            raise ShapeMismatchError("representation matrices of different shapes")
        self.label = label
        if check and not self.is_rep():
            raise NotALieAlgebraError(f"the matrices of {self} do not respect the bracket")

    def is_rep(self):
        "rho([x_i, x_j]) = [rho(x_i), rho(x_j)] for every pair"
        c = self.algebra.c
        for i in range(self.algebra.dim):
            for j in range(i + 1, self.algebra.dim):
                image = sum((c[i, j, k] * self.matrices[k] for k in range(self.algebra.dim)),
                            fraction_array(np.zeros((self.dim, self.dim), dtype=int)))
                if np.any(image != commutator(self.matrices[i], self.matrices[j])):
                    return False
        return True

    def dual_matrices(self):
        "rho(g^0), ..., rho(g^{d-1})"
        dual = self.algebra.dual_basis
        zero = fraction_array(np.zeros((self.dim, self.dim), dtype=int))
        return [sum((dual[i, l] * self.matrices[l] for l in range(self.algebra.dim)), zero)
                for i in range(self.algebra.dim)]

    def casimir_operator(self):
        "sum_i rho(g^i) rho(x_i)"
        zero = fraction_array(np.zeros((self.dim, self.dim), dtype=int))
        return sum((g @ x for g, x in zip(self.dual_matrices(), self.matrices)), zero)

    def __repr__(self):
        return f"Rep(label={self.label}, dim={self.dim})"


def sl2_rep(algebra, m):
    '''
    Irreducible sl_2 module of highest weight m (spin m/2) on the weight basis
    v_0..v_m: h v_k = (m - 2k) v_k, e v_k = (m - k + 1) v_{k-1}, f v_k = (k + 1) v_{k+1}.
    '''
    if m < 0:
        raise ValueError(f"negative highest weight {m}")
    dim = m + 1
    e, f, h = (np.zeros((dim, dim), dtype=int) for _ in range(3))
    for k in range(dim):
        h[k, k] = m - 2 * k
        if k > 0:
            e[k - 1, k] = m - k + 1
        if k < m:
            f[k + 1, k] = k + 1
    return Rep(algebra, [e, f, h], label=m)


def trivial_rep(algebra, label=0):
    return Rep(algebra, [np.zeros((1, 1), dtype=int)] * algebra.dim, label=label, check=False)


def embed(dims, factors):
    "Kronecker product with factors[c] in slot c and the identity in the other slots"
    result = eye(1)
    for c, dim in enumerate(dims):
        result = np.kron(result, factors.get(c, eye(dim)))
    return result


def tensor_action(reps, index):
    "rho(x_index) acting on the tensor product of reps by the Leibniz rule"
    dims = [r.dim for r in reps]
    total = fraction_array(np.zeros((int(np.prod(dims)),) * 2, dtype=int))
    for c, rep in enumerate(reps):
        total = total + embed(dims, {c: rep.matrices[index]})
    return total


def casimir_pair(reps, l, p):
    '''
    Omega_lp = sum_i rho_l(g^i) x rho_p(x_i) in the full tensor product.
    @l, p: distinct slots, 0-based
    '''
    if l == p or not (0 <= l < len(reps) and 0 <= p < len(reps)):
        raise IndexRangeError(f"no Casimir insertion at slots ({l}, {p}) of {len(reps)}")
    dims = [r.dim for r in reps]
    total = fraction_array(np.zeros((int(np.prod(dims)),) * 2, dtype=int))
    for g, x in zip(reps[l].dual_matrices(), reps[p].matrices):
        total = total + embed(dims, {l: g, p: x})
    return total


def invariant_maps(sources, target):
    '''
    Basis of Hom_g(source_1 x ... x source_n, target): matrices F with
    rho_target(x) F = F rho_sources(x) for every basis vector x.
    '''
    algebra = target.algebra
    dim_source = int(np.prod([r.dim for r in sources])) if sources else 1
    blocks = []
    for index in range(algebra.dim):
        acting = tensor_action(sources, index) if sources else fraction_array([[0]])
        # vec(A X B) = (B^T kron A) vec(X), column-major
        blocks.append(to_sympy(np.kron(eye(dim_source), target.matrices[index]) - np.kron(acting.T, eye(target.dim))))
    system = sympy.Matrix.vstack(*blocks)
    basis = []
    for vector in system.nullspace():
        flat = from_sympy(vector)[:, 0]
        basis.append(flat.reshape((dim_source, target.dim)).T.copy())
    logger.debug("Hom(%s, %s) has dimension %d", [r.label for r in sources], target.label, len(basis))
    return basis


def is_irreducible(rep):
    return len(invariant_maps([rep], rep)) == 1


def casimir_eigenvalue(rep):
    "Scalar by which sum_i rho(g^i) rho(x_i) acts on an irreducible rep"
    if not is_irreducible(rep):
        raise NotIrreducibleError(f"{rep} is not irreducible")
    operator = rep.casimir_operator()
    value = operator[0, 0]
    if np.any(operator != value * eye(rep.dim)):
        raise NotIrreducibleError(f"the Casimir operator of {rep} is not scalar")
    return value

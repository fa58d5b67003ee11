import logging
import numbers

import numpy as np

from treealg.axioms.data import Decomposition, Module, PreTreeAlgebraData, TreeFunctorData
from treealg.axioms.report import Report
from treealg.connalg import Connection, GaugeMap
from treealg.cooperad import TruncMatrix, TruncTensor
from treealg.liealg import LieAlgebra, Rep
from treealg.ratfield import OneForm, RatFunc

'''
Structural scan for exactness: walks a constructed object down to its scalar
coefficients and lists every one that is not an exact rational. Floats,
complex numbers and anything unknown count as contamination.
'''

logger = logging.getLogger(__name__)


def _is_exact(x):
    return isinstance(x, numbers.Rational) and not isinstance(x, bool)


def _children(obj):
    "(suffix, child) pairs of a composite object, None for a scalar"
    from treealg.kzwzw import KZData, MapBasis
    if isinstance(obj, RatFunc):
        return [(f".num{list(exps)}", c) for exps, c in obj.num.items()]
    if isinstance(obj, OneForm):
        return [(f".components[{i}]", c) for i, c in enumerate(obj.components)]
    if isinstance(obj, TruncTensor):
        return [(".func", obj.func)]
    if isinstance(obj, TruncMatrix):
        return [(f"[{i}, {j}]", obj.entry(i, j)) for i, j in np.ndindex(*obj.shape)]
    if isinstance(obj, np.ndarray):
        return [(f"[{', '.join(map(str, index))}]", x) for index, x in np.ndenumerate(obj)]
    if isinstance(obj, Connection):
        return ([(f".E[{i}]", m) for i, m in enumerate(obj)]
                + [(f".basis_degrees[{k}]", d) for k, d in enumerate(obj.basis_degrees)])
    if isinstance(obj, GaugeMap):
        return [(".matrix", obj.matrix), (".degree", obj.degree)]
    if isinstance(obj, Decomposition):
        return [(".matrix", obj.matrix)]
    if isinstance(obj, MapBasis):
        return [(f"[{a}]", m) for a, m in enumerate(obj.maps)]
    if isinstance(obj, Module):
        return [(".connection", obj.connection), (".basis", obj.basis)]
    if isinstance(obj, TreeFunctorData):
        return ([(f".modules[{key}]", m) for key, m in obj.modules.items()]
                + [(f".decompositions[{key}]", d) for key, d in obj.decompositions.items()]
                + [(f".unit_gauges[{key}]", g) for key, g in obj.unit_gauges.items()]
                + [(f".permutations[{key}]", g) for key, g in obj.permutations.items()]
                + [(f".alpha[{label}]", a) for label, a in obj.alpha.items()])
    if isinstance(obj, PreTreeAlgebraData):
        return [(".functor", obj.functor)] + [(f".phi[{key}]", images) for key, images in obj.phi.items()]
    if isinstance(obj, Rep):
        return [(f".matrices[{i}]", m) for i, m in enumerate(obj.matrices)]
    if isinstance(obj, LieAlgebra):
        return [(".c", obj.c), (".killing", obj.killing), (".killing_inverse", obj.killing_inverse),
                (".h_dual", obj.h_dual)]
    if isinstance(obj, KZData):
        return ([(".algebra", obj.algebra), (".level", obj.level), (".kappa", obj.kappa), (".full", obj.full)]
                + [(f".reps[{i}]", r) for i, r in enumerate(obj.reps)]
                + [(f".casimirs[{pair}]", m) for pair, m in obj.casimirs.items()]
                + [(f".bases[{label}]", b) for label, b in obj.bases.items()]
                + [(f".restricted[{label}]", c) for label, c in obj.restricted.items()])
    if isinstance(obj, dict):
        return [(f"[{key!r}]", v) for key, v in obj.items()]
    if isinstance(obj, (list, tuple)):
        return [(f"[{i}]", v) for i, v in enumerate(obj)]
    return None


def inexact_coefficients(obj, where=""):
    '''
    Every coefficient below obj that is not an exact rational.
    Return a list of (location, value) in traversal order; empty when obj is exact.
    '''
    found = []
    stack = [(where, obj)]
    while stack:
        path, x = stack.pop()
        if x is None or _is_exact(x):
            continue
        children = _children(x)
        if children is None:
            found.append((path, x))
            continue
        stack.extend(reversed([(path + suffix, child) for suffix, child in children]))
    return found


def verify_rationality(objects):
    '''
    Scan named objects for inexact coefficients.
    @objects: map name -> constructed object (KZData, TreeFunctorData, Connection, ...)
    '''
    report = Report("rationality")
    for name, obj in objects.items():
        found = inexact_coefficients(obj, name)
        detail = f"{len(found)} inexact coefficients, first {found[0][0]} = {found[0][1]!r}" if found else ""
        report.record("exact coefficients", not found, detail, key=name)
    logger.info("rationality scan of %d objects: %s", len(objects), "exact" if report.passed else "contaminated")
    return report

import json
import logging
import os
from fractions import Fraction

import numpy as np

from treealg.axioms.data import Decomposition, Module, TreeFunctorData
from treealg.connalg import Connection, GaugeMap
from treealg.cooperad import TruncMatrix, TruncTensor
from treealg.errors import FormatError
from treealg.liealg import LieAlgebra, Rep
from treealg.monodromy import MonodromyResult, Path
from treealg.ratfield import OneForm, RatFunc

'''
JSON codecs. Exact rationals are written as strings ("3/8"), complex numbers
as [re, im] pairs and matrices as nested lists. A tree functor is stored as a
directory: manifest.json with the labels, unit and degree shifts, plus one
file per tuple holding its connection, decompositions and certificates.
'''

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"


def _fail(message, position):
    raise FormatError(message, position)


def parse(decoder, obj, position=""):
    "Run decoder on obj, turning malformed input into FormatError"
    try:
        return decoder(obj)
    except FormatError:
        raise
    except (KeyError, IndexError, TypeError, ValueError, ZeroDivisionError, AttributeError) as error:
        raise FormatError(f"{type(error).__name__}: {error}", position) from None


def encode_fraction(x):
    return str(Fraction(x))


def decode_fraction(s):
    if not isinstance(s, (str, int)):
        raise TypeError(f"expected an exact rational, got {s!r}")
    return Fraction(s)


def encode_ratfunc(f):
    return {
        "n": f.n_vars,
        "num": [[encode_fraction(c), list(exps)] for exps, c in sorted(f.num.items())],
        "den": [[i, j, m] for (i, j), m in sorted(f.den.items())],
    }


def decode_ratfunc(obj):
    num = {}
    for c, exps in obj["num"]:
        if len(exps) != obj["n"]:
            raise ValueError(f"exponent vector {exps} for {obj['n']} variables")
        num[tuple(exps)] = decode_fraction(c)
    den = {}
    for i, j, m in obj.get("den", []):
        if not i < j:
            raise ValueError(f"diagonal factor ({i}, {j}) is not ordered")
        den[(i, j)] = m
    return RatFunc(obj["n"], num, den)


def encode_rows(matrix):
    "A matrix of RatFunc as nested rows"
    return [[encode_ratfunc(e) for e in row] for row in np.asarray(matrix, dtype=object)]


def decode_rows(rows, cols=None):
    '''
    Nested rows of RatFunc back into an object grid.
    @cols: column count, needed only when there are no rows
    '''
    width = len(rows[0]) if rows else (cols or 0)
    if any(len(row) != width for row in rows):
        raise ValueError("rows of different lengths")
    grid = np.empty((len(rows), width), dtype=object)
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            grid[i, j] = decode_ratfunc(entry)
    return grid


def encode_matrix(matrix, entry=encode_ratfunc):
    matrix = np.asarray(matrix, dtype=object)
    return {"shape": list(matrix.shape), "entries": [entry(e) for e in matrix.flat]}


def decode_matrix(obj, entry=decode_ratfunc):
    shape = tuple(obj["shape"])
    entries = [entry(e) for e in obj["entries"]]
    if int(np.prod(shape)) != len(entries):
        raise ValueError(f"{len(entries)} entries for shape {shape}")
    matrix = np.empty(len(entries), dtype=object)
    matrix[:] = entries
    return matrix.reshape(shape)


def encode_exact(matrix):
    return encode_matrix(matrix, encode_fraction)


def decode_exact(obj):
    return decode_matrix(obj, decode_fraction)


def encode_oneform(form):
    return {"components": [encode_ratfunc(c) for c in form.components]}


def decode_oneform(obj):
    return OneForm([decode_ratfunc(c) for c in obj["components"]])


def encode_trunctensor(x):
    "Basic tensors f_1 x ... x f_n x g, the f_i over their block variables and g over z"
    terms = [{"inner": [encode_ratfunc(f) for f in inner], "outer": encode_ratfunc(outer)}
             for inner, outer in x.basic_terms()]
    return {"partition": list(x.partition), "order": x.order, "terms": terms}


def decode_trunctensor(obj):
    terms = [([decode_ratfunc(f) for f in term["inner"]], decode_ratfunc(term["outer"])) for term in obj["terms"]]
    return TruncTensor.from_terms(obj["partition"], obj["order"], terms)


def encode_truncmatrix(m):
    grid = np.empty(m.shape, dtype=object)
    for i in range(m.shape[0]):
        for j in range(m.shape[1]):
            grid[i, j] = m.entry(i, j)
    return {"partition": list(m.partition), "order": m.order, "grid": encode_matrix(grid)}


def decode_truncmatrix(obj):
    return TruncMatrix(obj["partition"], obj["order"], decode_matrix(obj["grid"]))


def encode_connection(conn):
    return {
        "n": conn.n_vars,
        "rank": conn.rank,
        "basis_degrees": [encode_fraction(d) for d in conn.basis_degrees],
        "E": [encode_rows(m) for m in conn],
    }


def decode_connection(obj):
    rank = obj["rank"]
    matrices = [decode_rows(rows, rank) for rows in obj["E"]]
    degrees = [decode_fraction(d) for d in obj.get("basis_degrees", [0] * rank)]
    return Connection(obj["n"], rank, matrices, degrees)


def encode_gauge(g):
    return {"n_vars": g.n_vars, "degree": encode_fraction(g.degree), "matrix": encode_matrix(g.matrix)}


def decode_gauge(obj):
    return GaugeMap(decode_matrix(obj["matrix"]), decode_fraction(obj.get("degree", 0)), obj["n_vars"])


def _complex(z):
    return [float(np.real(z)), float(np.imag(z))]


def encode_path(path):
    return {"points": [[_complex(z) for z in p] for p in path.points]}


def decode_path(obj):
    return Path([[complex(re, im) for re, im in point] for point in obj["points"]])


def encode_monodromy(result):
    return {
        "matrix": [[_complex(z) for z in row] for row in np.asarray(result.matrix)],
        "eigenvalues": [_complex(z) for z in result.eigenvalues],
        "step_count": result.step_count,
        "error_estimate": result.error_estimate,
    }


def decode_monodromy(obj):
    matrix = np.array([[complex(re, im) for re, im in row] for row in obj["matrix"]], dtype=complex)
    return MonodromyResult(matrix, obj["step_count"], obj.get("error_estimate", 0.0))


def encode_algebra(algebra):
    return {
        "structure_constants": encode_exact(algebra.c),
        "h_dual": None if algebra.h_dual is None else encode_fraction(algebra.h_dual),
        "cartan_type": list(algebra.cartan_type) if algebra.cartan_type else None,
        "names": algebra.names,
    }


def decode_algebra(obj):
    h_dual = obj.get("h_dual")
    cartan = obj.get("cartan_type")
    return LieAlgebra(decode_exact(obj["structure_constants"]), None if h_dual is None else decode_fraction(h_dual),
                      tuple(cartan) if cartan else None, obj.get("names"))


def encode_rep(rep):
    return {"label": rep.label, "matrices": [encode_exact(m) for m in rep.matrices]}


def decode_rep(obj, algebra):
    return Rep(algebra, [decode_exact(m) for m in obj["matrices"]], obj.get("label"))


def encode_kz(kz, connection=None):
    '''
    A connection file carrying the KZ data it was built from. sl_2 data is
    described by its weights; any other algebra is written out in full.
    @connection: the connection to store, default the full KZ connection
    '''
    obj = encode_connection(kz.full if connection is None else connection)
    if kz.algebra.cartan_type == ("A", 1):
        obj["kz"] = {"algebra": "sl2", "weights": kz.weights, "level": encode_fraction(kz.level)}
    else:
        obj["kz"] = {"algebra": encode_algebra(kz.algebra), "reps": [encode_rep(r) for r in kz.reps],
                     "level": encode_fraction(kz.level)}
    return obj


def decode_kz(obj):
    "Rebuild the KZData a connection file was made from"
    from treealg.kzwzw import kz_build
    from treealg.liealg import sl2, sl2_rep
    meta = obj["kz"]
    if meta["algebra"] == "sl2":
        algebra = sl2()
        reps = [sl2_rep(algebra, int(m)) for m in meta["weights"]]
    elif isinstance(meta["algebra"], dict):
        algebra = decode_algebra(meta["algebra"])
        reps = [decode_rep(r, algebra) for r in meta["reps"]]
    else:
        raise ValueError(f"unknown algebra {meta['algebra']!r}")
    return kz_build(algebra, reps, decode_fraction(meta["level"]))


def _label(x):
    return tuple(_label(y) for y in x) if isinstance(x, list) else x


def encode_tuple(data, key):
    "Everything stored for one tuple key"
    module = data.module(*key)
    inputs, infinity = key
    obj = {"inputs": list(inputs), "infinity": infinity, "connection": encode_connection(module.connection)}
    if module.basis is not None:
        obj["basis"] = [encode_exact(f) for f in module.basis.maps]
    obj["decompositions"] = []
    for (k, partition), d in sorted(data.decompositions.items()):
        if k == key:
            matrix = {"exact": encode_exact(d.matrix)} if d.is_constant else {"truncated": encode_truncmatrix(d.matrix)}
            obj["decompositions"].append({"partition": list(partition), "support": [list(mu) for mu in d.support],
                                          **matrix})
    obj["unit_gauges"] = [{"position": p, "gauge": None if g is None else encode_gauge(g)}
                          for (k, p), g in sorted(data.unit_gauges.items()) if k == key]
    obj["permutations"] = [{"slot": i, "gauge": encode_gauge(g)}
                           for (k, i), g in sorted(data.permutations.items()) if k == key]
    return obj


def decode_tuple(data, obj):
    from treealg.kzwzw import MapBasis
    key = (tuple(_label(x) for x in obj["inputs"]), _label(obj["infinity"]))
    basis = MapBasis([decode_exact(f) for f in obj["basis"]]) if "basis" in obj else None
    data.add(Module(*key, decode_connection(obj["connection"]), basis))
    for d in obj.get("decompositions", []):
        partition = tuple(d["partition"])
        matrix = decode_exact(d["exact"]) if "exact" in d else decode_truncmatrix(d["truncated"])
        data.decompositions[(key, partition)] = Decomposition(key, partition, [_label(mu) for mu in d["support"]],
                                                              matrix)
    for u in obj.get("unit_gauges", []):
        data.unit_gauges[(key, u["position"])] = None if u["gauge"] is None else decode_gauge(u["gauge"])
    for p in obj.get("permutations", []):
        data.permutations[(key, p["slot"])] = decode_gauge(p["gauge"])


def save_treefunctor(data, directory):
    '''
    Write data to directory: manifest.json plus tuple_XXXX.json per key.
    @directory: created when missing
    '''
    os.makedirs(directory, exist_ok=True)
    files = []
    for number, key in enumerate(data.keys()):
        name = f"tuple_{number:04d}.json"
        with open(os.path.join(directory, name), "w") as handle:
            json.dump(encode_tuple(data, key), handle)
        files.append(name)
    manifest = {
        "labels": data.labels,
        "unit": data.unit,
        "alpha": [[label, encode_fraction(a)] for label, a in data.alpha.items()],
        "metadata": data.metadata,
        "tuples": files,
    }
    with open(os.path.join(directory, MANIFEST), "w") as handle:
        json.dump(manifest, handle, indent=1)
    logger.info("wrote %d tuples to %s", len(files), directory)


def _read_json(path):
    try:
        with open(path) as handle:
            return json.load(handle)
    except json.JSONDecodeError as error:
        raise FormatError(error.msg, f"{path}:{error.lineno}:{error.colno}") from None
    except OSError as error:
        raise FormatError(str(error), path) from None


def load_treefunctor(directory):
    path = os.path.join(directory, MANIFEST)
    manifest = _read_json(path)

    def build(obj):
        return TreeFunctorData([_label(x) for x in obj["labels"]], _label(obj["unit"]),
                               {_label(label): decode_fraction(a) for label, a in obj["alpha"]},
                               metadata=obj.get("metadata"))

    data = parse(build, manifest, path)
    for name in manifest.get("tuples", []):
        tuple_path = os.path.join(directory, name)
        parse(lambda obj: decode_tuple(data, obj), _read_json(tuple_path), tuple_path)
    return data


def load(path, decoder):
    "Read one JSON file and decode it"
    return parse(decoder, _read_json(path), path)


def dump(obj, path, encoder):
    with open(path, "w") as handle:
        json.dump(encoder(obj), handle, indent=1)

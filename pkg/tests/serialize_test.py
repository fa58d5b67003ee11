import json
import os
import tempfile
import unittest
from fractions import Fraction

from treealg import serialize
from treealg.axioms import verify_treefunctor
from treealg.connalg import Connection
from treealg.cooperad import TruncTensor, cocompose
from treealg.errors import FormatError
from treealg.kzwzw import kz_build, wzw_instance
from treealg.liealg import sl2, sl2_rep
from treealg.ratfield import RatFunc


class CodecTestCase(unittest.TestCase):
    def test_fractions_are_written_as_text(self):
        self.assertEqual(serialize.encode_fraction(Fraction(-3, 8)), "-3/8")
        self.assertEqual(serialize.decode_fraction("-3/8"), Fraction(-3, 8))
        with self.assertRaises(TypeError):
            serialize.decode_fraction(0.375)

    def test_connection_file_is_stable(self):
        conn = Connection.abelian(3, {(0, 1): Fraction(1, 3), (1, 2): -2})
        first = serialize.encode_connection(conn)
        decoded = serialize.decode_connection(json.loads(json.dumps(first)))
        self.assertEqual(decoded, conn)
        self.assertEqual(json.dumps(serialize.encode_connection(decoded)), json.dumps(first))

    def test_kz_file_rebuilds_the_data(self):
        g = sl2()
        kz = kz_build(g, [sl2_rep(g, 1), sl2_rep(g, 2)], 3)
        obj = serialize.encode_kz(kz)
        self.assertEqual(obj["kz"]["weights"], [1, 2])
        rebuilt = serialize.decode_kz(json.loads(json.dumps(obj)))
        self.assertEqual(rebuilt.full, kz.full)

    def test_ratfunc_file_layout(self):
        obj = {"n": 2, "num": [["1", [0, 0]]], "den": [[0, 1, 1]]}
        self.assertEqual(serialize.decode_ratfunc(obj), RatFunc.diagonal(2, 0, 1, -1))
        self.assertEqual(serialize.encode_ratfunc(RatFunc.diagonal(2, 0, 1, -1)), obj)
        obj = {"n": 2, "num": [["-3/8", [2, 0]], ["1/2", [0, 1]]], "den": []}
        f = serialize.decode_ratfunc(obj)
        self.assertEqual(f, RatFunc.variable(2, 0) ** 2 * Fraction(-3, 8) + RatFunc.variable(2, 1) * Fraction(1, 2))

    def test_connection_file_layout(self):
        conn = Connection.abelian(2, {(0, 1): Fraction(1, 3)})
        obj = serialize.encode_connection(conn)
        self.assertListEqual(sorted(obj), ["E", "basis_degrees", "n", "rank"])
        self.assertEqual(obj["n"], 2)
        self.assertEqual(obj["E"][0], [[{"n": 2, "num": [["1/3", [0, 0]]], "den": [[0, 1, 1]]}]])
        self.assertEqual(obj["E"][1], [[{"n": 2, "num": [["-1/3", [0, 0]]], "den": [[0, 1, 1]]}]])

    def test_rank_zero_connection(self):
        conn = Connection.trivial(2, 0)
        obj = json.loads(json.dumps(serialize.encode_connection(conn)))
        self.assertEqual(obj["E"], [[], []])
        self.assertEqual(serialize.decode_connection(obj), conn)

    def test_trunc_tensor_is_written_as_basic_tensors(self):
        x = cocompose(RatFunc.diagonal(2, 0, 1, -1), (1, 1), 2)
        obj = serialize.encode_trunctensor(x)
        self.assertListEqual(sorted(obj), ["order", "partition", "terms"])
        for term in obj["terms"]:
            self.assertEqual([f["n"] for f in term["inner"]], [1, 1])
            self.assertEqual(term["outer"]["n"], 2)
        self.assertEqual(serialize.decode_trunctensor(json.loads(json.dumps(obj))), x)

    def test_trunc_tensor_inside_a_block(self):
        x = cocompose(RatFunc.diagonal(3, 0, 1, -1) * RatFunc.variable(3, 2), (2, 1), 1)
        obj = serialize.encode_trunctensor(x)
        self.assertTrue(all([f["n"] for f in term["inner"]] == [2, 1] for term in obj["terms"]))
        self.assertEqual(serialize.decode_trunctensor(obj), x)

    def test_trunc_tensor_from_a_literal_file(self):
        t = {"n": 1, "num": [["1", [1]]], "den": []}
        one = {"n": 1, "num": [["1", [0]]], "den": []}
        obj = {"partition": [1, 1], "order": 1,
               "terms": [{"inner": [t, one], "outer": {"n": 2, "num": [["1", [0, 0]]], "den": [[0, 1, 2]]}}]}
        x = serialize.decode_trunctensor(obj)
        inner = TruncTensor.from_inner((1, 1), 1, 0, RatFunc.variable(1, 0))
        expected = inner * TruncTensor.from_outer((1, 1), 1, RatFunc.diagonal(2, 0, 1, -2))
        self.assertEqual(x, expected)

    def test_malformed_entry_carries_its_position(self):
        obj = serialize.encode_ratfunc(RatFunc.diagonal(2, 0, 1, -1))
        obj["num"] = [[0.5, [0, 0]]]
        with self.assertRaises(FormatError) as context:
            serialize.parse(serialize.decode_ratfunc, obj, "matrices[0]")
        self.assertEqual(context.exception.position, "matrices[0]")

    def test_wrong_entry_count_is_a_format_error(self):
        obj = {"shape": [2, 2], "entries": ["1", "0", "0"]}
        with self.assertRaises(FormatError):
            serialize.parse(serialize.decode_exact, obj, "grid")


class FileTestCase(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def test_tree_functor_directory_round_trip(self):
        data = wzw_instance(sl2(), [1], 1, max_arity=3)
        first = os.path.join(self.directory.name, "first")
        second = os.path.join(self.directory.name, "second")
        serialize.save_treefunctor(data, first)
        loaded = serialize.load_treefunctor(first)
        serialize.save_treefunctor(loaded, second)
        self.assertListEqual(sorted(os.listdir(first)), sorted(os.listdir(second)))
        for name in os.listdir(first):
            with open(os.path.join(first, name)) as a, open(os.path.join(second, name)) as b:
                self.assertEqual(a.read(), b.read(), name)
        self.assertEqual(loaded.labels, data.labels)
        self.assertTrue(verify_treefunctor(loaded, 1).passed)

    def test_broken_json_reports_line_and_column(self):
        path = os.path.join(self.directory.name, "broken.json")
        with open(path, "w") as handle:
            handle.write('{"n": 2,\n "rank": }')
        with self.assertRaises(FormatError) as context:
            serialize.load(path, serialize.decode_connection)
        self.assertTrue(context.exception.position.startswith(path + ":2:"))

    def test_missing_file_is_a_format_error(self):
        with self.assertRaises(FormatError):
            serialize.load_treefunctor(os.path.join(self.directory.name, "nowhere"))

    def test_dump_then_load(self):
        path = os.path.join(self.directory.name, "conn.json")
        conn = Connection.abelian(2, {(0, 1): Fraction(5, 7)})
        serialize.dump(conn, path, serialize.encode_connection)
        self.assertEqual(serialize.load(path, serialize.decode_connection), conn)


if __name__ == '__main__':
    unittest.main()

import contextlib
import io
import json
import os
import tempfile
import unittest

from treealg import serialize
from treealg.cli import BAD_INPUT, FAILED, PASSED, run
from treealg.connalg import Connection
from treealg.ratfield import RatFunc


def capture(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = run(argv)
    return code, out.getvalue()


def json_block(output):
    return json.loads(output[output.index("\n{") + 1:])


class CliTestCase(unittest.TestCase):
    def setUp(self):
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        self.dir = directory.name
        self.kz = os.path.join(self.dir, "kz.json")
        code, _ = capture(["kz", "--weights", "1,1", "--level", "1", "--out", self.kz])
        self.assertEqual(code, PASSED)

    def test_built_kz_file_is_flat(self):
        code, output = capture(["check-flat", self.kz])
        self.assertEqual(code, PASSED)
        report = json_block(output)
        self.assertTrue(report["half"])
        self.assertTrue(report["standard"])
        self.assertEqual(report["conventions"]["transport_sign"], -1)

    def test_singlet_channel_degree(self):
        code, output = capture(["degree", self.kz, "--channel", "0"])
        self.assertEqual(code, PASSED)
        self.assertIn("degree 1/8", output)
        self.assertEqual(json_block(output)["predicted"], "1/8")

    def test_restricted_file_keeps_the_channel(self):
        out = os.path.join(self.dir, "triplet.json")
        code, output = capture(["restrict", self.kz, "--channel", "2", "--out", out])
        self.assertEqual(code, PASSED)
        self.assertEqual(json_block(output)["rank"], 1)
        code, output = capture(["degree", out])
        self.assertEqual(code, PASSED)
        self.assertEqual(json_block(output)["degree"], "-1/24")

    def test_non_flat_file_fails(self):
        path = os.path.join(self.dir, "bent.json")
        conn = Connection(2, 1, [[[RatFunc.diagonal(2, 0, 1, -1)]], [[0]]])
        serialize.dump(conn, path, serialize.encode_connection)
        code, output = capture(["check-flat", path, "--convention", "standard"])
        self.assertEqual(code, FAILED)
        self.assertEqual(json_block(output)["standard_witness"], [0, 1])

    def test_malformed_file_is_bad_input(self):
        path = os.path.join(self.dir, "broken.json")
        with open(path, "w") as handle:
            handle.write("{not json")
        code, _ = capture(["check-flat", path])
        self.assertEqual(code, BAD_INPUT)

    def test_unknown_subcommand_is_bad_input(self):
        code, _ = capture(["flatten", self.kz])
        self.assertEqual(code, BAD_INPUT)

    def test_residue_comparison(self):
        code, _ = capture(["residue", self.kz, "--pair", "0,1"])
        self.assertEqual(code, PASSED)

    def test_alias_convention_name(self):
        code, output = capture(["check-flat", self.kz, "--convention", "paper"])
        self.assertEqual(code, PASSED)
        report = json_block(output)
        self.assertTrue(report["paper"])
        self.assertEqual(report["flatness_convention"], "paper")

    def test_double_pole_residue_reports_the_raw_monodromy(self):
        path = os.path.join(self.dir, "double.json")
        f = RatFunc.diagonal(2, 0, 1, -2)
        serialize.dump(Connection(2, 1, [[[f]], [[-f]]]), path, serialize.encode_connection)
        code, output = capture(["residue", path, "--pair", "0,1"])
        self.assertEqual(code, PASSED)
        self.assertIn("raw monodromy", output)
        payload = json_block(output)
        self.assertFalse(payload["supported"])
        self.assertIsNone(payload["max_mismatch"])
        real, imag = payload["matrix"][0][0]
        self.assertAlmostEqual(real, 1.0, places=7)
        self.assertAlmostEqual(imag, 0.0, places=7)

    def test_wzw_data_verifies(self):
        out = os.path.join(self.dir, "wzw")
        code, _ = capture(["wzw", "--weights", "1", "--level", "1", "--max-arity", "3", "--out", out])
        self.assertEqual(code, PASSED)
        for structure in ("pretree", "treefunctor", "pta", "rationality"):
            with self.subTest(structure=structure):
                code, output = capture(["verify", structure, out])
                self.assertEqual(code, PASSED, output)

    def test_iso_without_gauges_is_bad_input(self):
        out = os.path.join(self.dir, "wzw")
        capture(["wzw", "--weights", "1", "--level", "1", "--max-arity", "2", "--out", out])
        code, _ = capture(["verify", "iso", out])
        self.assertEqual(code, BAD_INPUT)


if __name__ == '__main__':
    unittest.main()

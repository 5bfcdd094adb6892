"""End-to-end checks of the openable command line: exit codes, bundle files
against the JSON schemas, golden transforms, and the verdicts round trip."""

import json
import math
import random
import shutil
import subprocess
import sys
import unittest
from pathlib import Path

import jsonschema

CLI = Path(sys.argv[1])
DOCS = Path(sys.argv[2])
WORK = Path(sys.argv[3])


def run(*args):
    return subprocess.run([str(CLI), *map(str, args)], capture_output=True, text=True)


def load(p):
    return json.loads(Path(p).read_text())


def validator(name):
    schema = load(DOCS / name)
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def rodrigues(joint, state):
    a = joint["axis"]
    n = math.sqrt(sum(x * x for x in a))
    a = [x / n for x in a]
    o = joint["origin"]
    if joint["type"] == "prismatic":
        r = [[1.0 if i == j else 0.0 for j in range(3)] for i in range(3)]
        t = [state * a[i] for i in range(3)]
    else:
        c, s = math.cos(state), math.sin(state)
        k = [[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]]
        r = [[(1.0 if i == j else 0.0) * c + s * k[i][j] + (1 - c) * a[i] * a[j] for j in range(3)]
             for i in range(3)]
        t = [o[i] - sum(r[i][j] * o[j] for j in range(3)) for i in range(3)]
    return [r[0] + [t[0]], r[1] + [t[1]], r[2] + [t[2]], [0.0, 0.0, 0.0, 1.0]]


class Cli(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        shutil.rmtree(WORK, ignore_errors=True)
        WORK.mkdir(parents=True)
        r = run("generate", "--seed", 3, "--count", 2, "-o", WORK / "scenes")
        assert r.returncode == 0, r.stderr
        cls.scenes = [WORK / "scenes" / "scene_0", WORK / "scenes" / "scene_1"]
        for s in cls.scenes:
            r = run("run", "--scene", s, "--set", "texture.scene_size=256", "--set", "texture.part_size=64")
            assert r.returncode == 0, r.stderr

    def test_exports_follow_the_schemas(self):
        scene_v = validator("scene.schema.json")
        golden_v = validator("golden.schema.json")
        for s in self.scenes:
            export = s / "out" / "export"
            scene = load(export / "scene.json")
            scene_v.validate(scene)
            golden_v.validate(load(export / "golden_vectors.json"))
            ids = [o["id"] for o in scene["objects"]]
            self.assertEqual(ids, sorted(ids))
            for o in scene["objects"]:
                self.assertTrue((export / o["part_mesh"]).exists())
                self.assertTrue((export / o["inner_box_mesh"]).exists())
        bad = load(self.scenes[0] / "out" / "export" / "scene.json")
        bad["objects"][0]["joint"]["type"] = "floating"
        self.assertFalse(scene_v.is_valid(bad))

    def test_golden_vectors_match_an_independent_rodrigues(self):
        golden = load(self.scenes[0] / "out" / "export" / "golden_vectors.json")
        self.assertGreater(len(golden["objects"]), 0)
        for o in golden["objects"]:
            states = [smp["state"] for smp in o["samples"]]
            self.assertEqual(states, [0.0, 0.5 * o["joint"]["range"], o["joint"]["range"]])
            for smp in o["samples"]:
                want = rodrigues(o["joint"], smp["state"])
                for k, v in enumerate(smp["matrix"]):
                    self.assertLess(abs(v - want[k // 4][k % 4]), 1e-9)

    def test_batch_eval_is_perfect_on_zero_noise(self):
        out = WORK / "report.json"
        r = run("eval", "--batch", *self.scenes, "--format", "json", "-o", out)
        self.assertEqual(r.returncode, 0, r.stderr)
        rep = load(out)
        self.assertEqual(rep["averaging"], "micro")
        row = next(t for t in rep["thresholds"] if t["tau"] == 0.5)
        self.assertEqual(row["precision"], 1.0)
        self.assertEqual(row["recall"], 1.0)
        self.assertEqual(row["joint_acc"], 1.0)
        per = [load_report(self, s) for s in self.scenes]
        self.assertEqual(row["tp"], sum(p["tp"] for p in per))
        self.assertEqual(row["n_gt"], sum(p["n_gt"] for p in per))
        r = run("eval", "--batch", *self.scenes, "--format", "csv")
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertTrue(r.stdout.startswith("tau,tp,n_pred,n_gt"))

    def test_verdicts_round_trip_through_eval(self):
        bundle = WORK / "bundle"
        r = run("inspect-dump", "--run", self.scenes[0] / "out", "-o", bundle)
        self.assertEqual(r.returncode, 0, r.stderr)
        verdicts_v = validator("verdicts.schema.json")
        empty = load(bundle / "verdicts.json")
        verdicts_v.validate(empty)
        self.assertEqual(empty["verdicts"], [])
        for f in ("scene.json", "scene.urdf", "golden_vectors.json"):
            self.assertTrue((bundle / f).exists())

        ids = [o["id"] for o in load(bundle / "scene.json")["objects"]]
        flagged = {"verdicts": [{"object_id": ids[0], "verdict": "wrong-axis", "state": 0.1},
                                {"object_id": ids[1], "verdict": "ok", "state": 0.0}]}
        verdicts_v.validate(flagged)
        (WORK / "verdicts.json").write_text(json.dumps(flagged))
        gt = self.scenes[0] / "ground_truth.json"
        base = run("eval", "--pred", bundle / "scene.json", "--gt", gt, "--format", "json")
        self.assertEqual(base.returncode, 0, base.stderr)
        judged = run("eval", "--pred", bundle / "scene.json", "--gt", gt, "--verdicts", WORK / "verdicts.json",
                     "--format", "json")
        self.assertEqual(judged.returncode, 0, judged.stderr)
        b, j = json.loads(base.stdout), json.loads(judged.stdout)
        self.assertEqual(j["thresholds"][0]["n_pred"], b["thresholds"][0]["n_pred"] - 1)
        self.assertTrue(any(ids[0] in a for a in j["annotations"]))

        urdf = run("eval", "--pred", bundle / "scene.urdf", "--gt", gt, "--mesh", self.scenes[0] / "mesh.ply",
                   "--format", "json")
        self.assertEqual(urdf.returncode, 0, urdf.stderr)
        self.assertEqual(json.loads(urdf.stdout)["thresholds"][1]["recall"], 1.0)

        bad = {"verdicts": [{"object_id": ids[0], "verdict": "maybe"}]}
        self.assertFalse(verdicts_v.is_valid(bad))
        (WORK / "bad_verdicts.json").write_text(json.dumps(bad))
        r = run("eval", "--pred", bundle / "scene.json", "--gt", gt, "--verdicts", WORK / "bad_verdicts.json")
        self.assertEqual(r.returncode, 2)

    def test_input_errors_exit_2(self):
        cases = [
            ("run", "--scene", WORK / "missing"),
            ("run", "--scene", self.scenes[0], "--set", "nope.key=1"),
            ("run", "--scene", self.scenes[0], "--set", "assemble.tau_low=0.9"),
            ("eval", "--pred", WORK / "missing.json", "--gt", self.scenes[0] / "ground_truth.json"),
            ("export", "--run", WORK / "missing", "-o", WORK / "x"),
            ("generate", "--seed", 1, "--min-parts", 5, "--max-parts", 2, "-o", WORK / "g"),
            ("run", "--no-such-flag"),
        ]
        for args in cases:
            with self.subTest(args=args):
                self.assertEqual(run(*args).returncode, 2)

    def test_missing_detections_write_no_checkpoints(self):
        scene = WORK / "nodet"
        shutil.copytree(self.scenes[0], scene, ignore=shutil.ignore_patterns("out"))
        (scene / "detections.json").unlink()
        self.assertEqual(run("run", "--scene", scene).returncode, 2)
        self.assertFalse((scene / "out" / "checkpoints").exists())

    def test_stage_failure_exits_3(self):
        run_dir = WORK / "stage_fail"
        shutil.copytree(self.scenes[1] / "out", run_dir)
        cp = run_dir / "checkpoints" / "05_assemble.json"
        data = load(cp)
        bg = data["data"]["background"]
        rng = random.Random(0)
        # a cloud of tiny unconnected triangles in random orientations cannot pack into 64x64
        for _ in range(3000):
            base = len(bg["vertices"]) // 3
            c = [rng.uniform(0, 4) for _ in range(3)]
            for _ in range(3):
                bg["vertices"] += [c[i] + rng.uniform(-0.01, 0.01) for i in range(3)]
                bg["colors"] += [0.5, 0.5, 0.5]
            bg["faces"] += [base, base + 1, base + 2]
        cp.write_text(json.dumps(data))
        r = run("export", "--run", run_dir, "-o", WORK / "stage_fail_export", "--scene-texture", 64)
        self.assertEqual(r.returncode, 3, r.stderr)
        ok = run("export", "--run", self.scenes[1] / "out", "-o", WORK / "reexport", "--no-textures")
        self.assertEqual(ok.returncode, 0, ok.stderr)
        self.assertTrue((WORK / "reexport" / "scene.urdf").exists())

    def test_ablation_reports_two_rows(self):
        r = run("ablate", "--synthetic", 2, "--seed", 4, "--format", "json")
        self.assertEqual(r.returncode, 0, r.stderr)
        rows = json.loads(r.stdout)["rows"]
        self.assertEqual([row["refinement"] for row in rows], [False, True])
        self.assertLessEqual(rows[1]["oe_mean"], rows[0]["oe_mean"])
        text = run("ablate", "--synthetic", 1, "--seed", 4)
        self.assertIn("w/o refinement", text.stdout)


def load_report(case, scene):
    r = run("eval", "--batch", scene, "--format", "json")
    case.assertEqual(r.returncode, 0, r.stderr)
    return next(t for t in json.loads(r.stdout)["thresholds"] if t["tau"] == 0.5)


if __name__ == "__main__":
    unittest.main(argv=sys.argv[:1], verbosity=2)

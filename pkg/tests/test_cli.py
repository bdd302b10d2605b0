import json

import numpy as np
import pytest

from conftest import family_corpus
from mope.cli import main


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    fam_a, fam_b, fam_c = family_corpus(seed=31, n_a=150, n_b=120, n_c=90)
    (root / "pwds.txt").write_text("\n".join(fam_a + fam_b + fam_c) + "\n")
    rng = np.random.default_rng(7)
    lines = []
    for i in range(120):
        w = "".join(rng.choice(list("abcde"), size=int(rng.integers(4, 8))))
        lines.append(f"user{i}\t{w}")
        lines.append(f"user{i}\t{w}1")
    (root / "accounts.tsv").write_text("\n".join(lines) + "\n")
    return root


@pytest.fixture(scope="module")
def offline_bundle(data_dir):
    out = data_dir / "model"
    rc = main(["train-offline", "--in", str(data_dir / "pwds.txt"), "--out", str(out),
               "--k", "3", "--order", "3", "--seed", "0"])
    assert rc == 0
    return out


@pytest.fixture(scope="module")
def pair_file(data_dir):
    out = data_dir / "pairs.tsv"
    rc = main(["pairs", "--in", str(data_dir / "accounts.tsv"), "--out", str(out),
               "--max-ed", "4"])
    assert rc == 0
    return out


@pytest.fixture(scope="module")
def online_bundle(data_dir, pair_file):
    out = data_dir / "online_model"
    rc = main(["train-online", "--pairs", str(pair_file), "--out", str(out),
               "--k", "2", "--beam-width", "30", "--candidates", "30", "--seed", "0"])
    assert rc == 0
    return out


def test_cluster_command(data_dir, capsys):
    out = data_dir / "cluster_report.json"
    rc = main(["cluster", "--in", str(data_dir / "pwds.txt"), "--out", str(out),
               "--k-range", "2:6", "--step", "1", "--tau", "0.5", "--seed", "0"])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["k_star"] >= 2
    assert (data_dir / "cluster_report.json.run.json").exists()
    manifest = json.loads((data_dir / "cluster_report.json.run.json").read_text())
    assert manifest["command"] == "cluster"
    assert manifest["seed"] == 0


def test_train_offline_writes_bundle(offline_bundle):
    manifest = json.loads((offline_bundle / "mope.json").read_text())
    assert manifest["variant"] == "offline"
    assert (offline_bundle / "run_manifest.json").exists()


def test_generate_sorted_tsv(data_dir, offline_bundle):
    out = data_dir / "cands.tsv"
    rc = main(["generate", "--model", str(offline_bundle), "--out", str(out),
               "--tau-gen", "1e-3", "--lmin", "1", "--lmax", "8"])
    assert rc == 0
    rows = [line.split("\t") for line in out.read_text().splitlines()]
    probs = [float(p) for _, p in rows]
    assert probs == sorted(probs, reverse=True)
    assert all(p >= 1e-3 for p in probs)


def test_generate_reproducible(data_dir, offline_bundle):
    out1 = data_dir / "c1.tsv"
    out2 = data_dir / "c2.tsv"
    for out in (out1, out2):
        assert main(["generate", "--model", str(offline_bundle), "--out", str(out),
                     "--tau-gen", "1e-3", "--lmin", "1", "--lmax", "8"]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_guess_number_command(data_dir, offline_bundle, capsys):
    rc = main(["guess-number", "--model", str(offline_bundle), "--password", "111",
               "--samples", "500", "--seed", "1"])
    assert rc == 0
    line = capsys.readouterr().out.strip().splitlines()[-1]
    pwd, g, log10 = line.split("\t")
    assert pwd == "111"
    assert float(g) >= 1.0


def test_crack_eval_command(data_dir, offline_bundle, capsys):
    rc = main(["crack-eval", "--model", str(offline_bundle),
               "--test", str(data_dir / "pwds.txt"),
               "--budgets", "1e2,1e4", "--samples", "400", "--seed", "0"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert payload["budgets"] == [100, 10000]
    assert all(0.0 <= f <= 1.0 for f in payload["fractions"])


def test_crack_eval_min_auto(data_dir, offline_bundle, capsys):
    rc = main(["crack-eval", "--model", str(offline_bundle),
               "--model", str(offline_bundle),
               "--test", str(data_dir / "pwds.txt"), "--min-auto",
               "--budgets", "1e3", "--samples", "300", "--seed", "0"])
    assert rc == 0


def test_pairs_command(pair_file):
    rows = [line.split("\t") for line in pair_file.read_text().splitlines()]
    assert rows and all(len(r) == 2 for r in rows)
    srcs = {tuple(r) for r in rows}
    assert all((b, a) in srcs for a, b in srcs)


def test_beam_command(data_dir, online_bundle, capsys):
    rc = main(["beam", "--model", str(online_bundle), "--src", "abcd",
               "--candidates", "10"])
    assert rc == 0
    rows = [line.split("\t") for line in capsys.readouterr().out.strip().splitlines()]
    assert all(len(r) == 4 for r in rows)
    assert [int(r[1]) for r in rows] == list(range(1, len(rows) + 1))


def test_online_eval_command(data_dir, online_bundle, pair_file, capsys):
    rc = main(["online-eval", "--model", str(online_bundle),
               "--pairs", str(pair_file), "--budgets", "1,10"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert payload["rates"]["1"] <= payload["rates"]["10"]


def test_distill_command(data_dir, offline_bundle):
    rc = main(["distill", "--model", str(offline_bundle),
               "--corpus", str(data_dir / "pwds.txt"),
               "--alpha", "0.7", "--temperature", "1.0", "--samples", "2000",
               "--seed", "0"])
    assert rc == 0
    manifest = json.loads((offline_bundle / "mope.json").read_text())
    assert manifest["student"] == "student.bin"
    assert (offline_bundle / "student.bin").exists()


def test_inspect_command(offline_bundle, capsys):
    rc = main(["inspect", "--model", str(offline_bundle)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "variant: offline" in out
    assert "k: 3" in out


def test_usage_error_exit_1():
    assert main(["no-such-command"]) == 1
    assert main(["generate", "--bogus-flag"]) == 1


def test_data_error_exit_2(tmp_path):
    assert main(["train-offline", "--in", str(tmp_path / "missing.txt"),
                 "--out", str(tmp_path / "m")]) == 2


def test_version_flag():
    assert main(["--version"]) == 0

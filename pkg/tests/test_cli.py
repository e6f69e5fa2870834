"""End-to-end command-line behavior: wiring, exit codes, determinism."""

import subprocess
import sys

import numpy as np
import pytest

from membank.datasetio import FeatureTable, load_bank, save_features


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "membank.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


def kv(stdout):
    pairs = {}
    for line in stdout.splitlines():
        if "=" in line:
            key, _, value = line.partition("=")
            pairs[key] = value
    return pairs


@pytest.fixture()
def features_csv(tmp_path):
    rng = np.random.default_rng(0)
    ids, labels, vals = [], [], []
    for c in range(3):
        mu = rng.normal(0, 1, 8) * 10
        for j in range(30):
            ids.append(f"{c}-{j}")
            labels.append(f"class{c}")
            vals.append(mu + rng.normal(0, 1, 8))
    path = tmp_path / "features.csv"
    save_features(FeatureTable(ids, labels, np.array(vals)), path)
    return path


def test_train_writes_loadable_bank(tmp_path, features_csv):
    bank_path = tmp_path / "bank.json"
    res = run_cli("train", "--features", str(features_csv), "--out", str(bank_path), "--k", "2")
    assert res.returncode == 0
    pairs = kv(res.stdout)
    assert pairs["bank_size"] == "6"
    assert pairs["core_patterns.class0"] == "2"
    bank = load_bank(bank_path)
    assert len(bank) == 6


def test_train_is_byte_deterministic(tmp_path, features_csv):
    p1, p2 = tmp_path / "b1.json", tmp_path / "b2.json"
    r1 = run_cli("train", "--features", str(features_csv), "--out", str(p1), "--k", "3",
                 "--mode", "bipolar", "--seed", "9")
    r2 = run_cli("train", "--features", str(features_csv), "--out", str(p2), "--k", "3",
                 "--mode", "bipolar", "--seed", "9")
    assert r1.returncode == r2.returncode == 0
    assert r1.stdout == r2.stdout
    assert p1.read_bytes() == p2.read_bytes()


def test_evaluate_train_on_train_perfect(tmp_path, features_csv):
    bank_path = tmp_path / "bank.json"
    run_cli("train", "--features", str(features_csv), "--out", str(bank_path), "--k", "1")
    res = run_cli("evaluate", "--features", str(features_csv), "--bank", str(bank_path))
    assert res.returncode == 0
    assert "accuracy=1.0" in res.stdout.splitlines()


def test_evaluate_report_confusion_row_sums(tmp_path, features_csv):
    bank_path = tmp_path / "bank.json"
    report_path = tmp_path / "report.txt"
    run_cli("train", "--features", str(features_csv), "--out", str(bank_path), "--k", "1",
            "--train-per-class", "20")
    res = run_cli("evaluate", "--features", str(features_csv), "--bank", str(bank_path),
                  "--train-per-class", "20", "--out", str(report_path))
    assert res.returncode == 0
    text = report_path.read_text()
    header, _, matrix = text.partition("confusion:\n")
    assert "format=membank-report" in header
    lines = matrix.strip().splitlines()
    labels = lines[0].split(",")[1:]
    sums = {}
    for line in lines[1:]:
        cells = line.split(",")
        sums[cells[0]] = sum(int(x) for x in cells[1:])
    # split left 10 test rows per class
    assert labels == ["class0", "class1", "class2"]
    assert sums == {"class0": 10, "class1": 10, "class2": 10}


def test_evaluate_threads_do_not_change_output(tmp_path, features_csv):
    bank_path = tmp_path / "bank.json"
    run_cli("train", "--features", str(features_csv), "--out", str(bank_path), "--k", "2",
            "--mode", "bipolar")
    outs = []
    for threads, report in (("1", "r1.txt"), ("4", "r4.txt")):
        path = tmp_path / report
        res = run_cli("evaluate", "--features", str(features_csv), "--bank", str(bank_path),
                      "--threads", threads, "--seed", "3", "--out", str(path))
        assert res.returncode == 0
        outs.append((res.stdout, path.read_bytes()))
    assert outs[0] == outs[1]


def test_classify_one(tmp_path, features_csv):
    bank_path = tmp_path / "bank.json"
    run_cli("train", "--features", str(features_csv), "--out", str(bank_path), "--k", "1")
    res = run_cli("classify-one", "--features", str(features_csv), "--bank", str(bank_path),
                  "--row-id", "1-5")
    assert res.returncode == 0
    pairs = kv(res.stdout)
    assert pairs["row_id"] == "1-5"
    assert pairs["label"] == "class1"
    assert pairs["tie"] == "false"
    missing = run_cli("classify-one", "--features", str(features_csv), "--bank", str(bank_path),
                      "--row-id", "nope")
    assert missing.returncode == 3


def test_sweep_csv_format_and_consistency(tmp_path, features_csv):
    out_csv = tmp_path / "sweep.csv"
    res = run_cli("sweep", "--features", str(features_csv), "--k-list", "1,2,4",
                  "--train-per-class", "20", "--test-per-class", "10",
                  "--seed", "5", "--out", str(out_csv))
    assert res.returncode == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "k,accuracy"
    assert len(lines) == 4
    assert [line.split(",")[0] for line in lines[1:]] == ["1", "2", "4"]

    # the k=1 sweep row equals a train+evaluate pair under the same seeds
    bank_path = tmp_path / "bank.json"
    run_cli("train", "--features", str(features_csv), "--out", str(bank_path), "--k", "1",
            "--train-per-class", "20", "--test-per-class", "10", "--seed", "5")
    ev = run_cli("evaluate", "--features", str(features_csv), "--bank", str(bank_path),
                 "--train-per-class", "20", "--test-per-class", "10", "--seed", "5")
    accuracy = kv(ev.stdout)["accuracy"]
    assert lines[1] == f"1,{accuracy}"


def test_sweep_deterministic_across_threads(tmp_path, features_csv):
    outs = []
    for threads, name in (("1", "s1.csv"), ("3", "s3.csv")):
        path = tmp_path / name
        res = run_cli("sweep", "--features", str(features_csv), "--k-list", "1,2",
                      "--train-per-class", "20", "--threads", threads, "--out", str(path))
        assert res.returncode == 0
        outs.append((res.stdout, path.read_bytes()))
    assert outs[0] == outs[1]


def test_sweep_with_separate_test_file(tmp_path, features_csv):
    res = run_cli("sweep", "--features", str(features_csv), "--test-features", str(features_csv),
                  "--k-list", "1")
    assert res.returncode == 0
    assert kv(res.stdout)["accuracy.k1"] == "1.0"


def test_recall_clean_probe(tmp_path, features_csv):
    bank_path = tmp_path / "bank.json"
    run_cli("train", "--features", str(features_csv), "--out", str(bank_path), "--k", "1",
            "--mode", "bipolar")
    res = run_cli("recall", "--bank", str(bank_path), "--noise", "0.0")
    assert res.returncode == 0
    pairs = kv(res.stdout)
    assert pairs["recovered"] == "true"
    assert pairs["sweeps_used"] == "1"
    assert pairs["noise_flips"] == "0"


def test_recall_noisy_single_pattern_recovers(tmp_path):
    # one stored pattern at n=64: a 10% corruption always falls back
    rng = np.random.default_rng(1)
    table = FeatureTable(
        [f"r{i}" for i in range(40)],
        ["only"] * 40,
        rng.normal(0, 1, (40, 64)),
    )
    feats = tmp_path / "wide.csv"
    save_features(table, feats)
    bank_path = tmp_path / "bank.json"
    run_cli("train", "--features", str(feats), "--out", str(bank_path), "--k", "1",
            "--mode", "bipolar")
    res = run_cli("recall", "--bank", str(bank_path), "--noise", "0.1", "--seed", "5")
    assert res.returncode == 0
    pairs = kv(res.stdout)
    assert pairs["noise_flips"] == "6"
    assert pairs["recovered"] == "true"


def test_recall_heavy_noise_well_formed(tmp_path, features_csv):
    bank_path = tmp_path / "bank.json"
    run_cli("train", "--features", str(features_csv), "--out", str(bank_path), "--k", "1",
            "--mode", "bipolar")
    res = run_cli("recall", "--bank", str(bank_path), "--noise", "0.5", "--seed", "2")
    assert res.returncode == 0
    pairs = kv(res.stdout)
    assert pairs["recovered"] in ("true", "false")
    assert pairs["converged"] in ("true", "false")
    assert int(pairs["sweeps_used"]) >= 1
    trace = [float(tok) for tok in pairs["energy_trace"].split(",")]
    assert trace == sorted(trace, reverse=True)


def test_recall_deterministic(tmp_path, features_csv):
    bank_path = tmp_path / "bank.json"
    run_cli("train", "--features", str(features_csv), "--out", str(bank_path), "--k", "2",
            "--mode", "bipolar")
    r1 = run_cli("recall", "--bank", str(bank_path), "--noise", "0.2", "--seed", "6")
    r2 = run_cli("recall", "--bank", str(bank_path), "--noise", "0.2", "--seed", "6")
    assert r1.stdout == r2.stdout


def test_recall_requires_bipolar_bank(tmp_path, features_csv):
    bank_path = tmp_path / "bank.json"
    run_cli("train", "--features", str(features_csv), "--out", str(bank_path), "--k", "1")
    res = run_cli("recall", "--bank", str(bank_path))
    assert res.returncode == 3


def test_usage_errors_exit_1(tmp_path, features_csv):
    bad_k = run_cli("train", "--features", str(features_csv), "--out", str(tmp_path / "b"), "--k", "0")
    assert bad_k.returncode == 1
    unknown_flag = run_cli("train", "--banana")
    assert unknown_flag.returncode == 1
    no_command = run_cli()
    assert no_command.returncode == 1


def test_usage_validation_precedes_io(tmp_path):
    # bad flag combo plus nonexistent file: must fail as usage, not I/O
    res = run_cli("sweep", "--features", str(tmp_path / "missing.csv"), "--k-list", "0,1",
                  "--train-per-class", "5")
    assert res.returncode == 1


def test_io_errors_exit_2(tmp_path, features_csv):
    res = run_cli("evaluate", "--features", str(tmp_path / "missing.csv"),
                  "--bank", str(tmp_path / "missing.json"))
    assert res.returncode == 2
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json")
    res = run_cli("recall", "--bank", str(garbled))
    assert res.returncode == 2


def test_help_exits_zero():
    assert run_cli("--help").returncode == 0
    for command in ("train", "evaluate", "classify-one", "sweep", "recall"):
        res = run_cli(command, "--help")
        assert res.returncode == 0
        assert "--seed" in res.stdout


def test_stdout_is_machine_greppable(tmp_path, features_csv):
    bank_path = tmp_path / "bank.json"
    res = run_cli("train", "--features", str(features_csv), "--out", str(bank_path), "--k", "1")
    for line in res.stdout.splitlines():
        assert "=" in line  # human chatter belongs on stderr
    assert res.stderr != ""

"""Secondary acceptance: the full chain build-dataset -> train ->
predict -> eval runs over file interfaces with no manual edits, the
smoke model clears chance-level accuracy, and the epoch log is sane.

The image pipeline is exercised strictly through its command line;
nothing here imports it.
"""

import json
import math
import struct
import subprocess
import sys

import pytest

from pcapvis_trainer.train import TrainerConfig, read_epoch_log, train
from pcapvis_trainer.predict import predict


def write_pcap(path, payloads):
    out = bytearray()
    out += struct.pack("<IHHiIII", 0xA1B2C3D4, 2, 4, 0, 0, 65535, 1)
    for i, payload in enumerate(payloads):
        out += struct.pack("<IIII", 1600000000 + i, 0, len(payload), len(payload))
        out += payload
    path.write_bytes(bytes(out))


def make_fixture_corpus(root):
    """Normal traffic reads as ASCII text; malware is null/0xFF heavy."""
    import random
    rng = random.Random(424242)
    normal = root / "normal"
    malware = root / "malware"
    normal.mkdir(parents=True)
    malware.mkdir(parents=True)
    words = b"GET /index.html HTTP/1.1 Host: example.test Accept: text/plain "
    size = 16384  # 16 chunks per capture, 96 images total
    for i in range(3):
        text = bytes(rng.choice(words) for _ in range(size))
        write_pcap(normal / f"n{i}.pcap", [text[j:j + 1024] for j in range(0, size, 1024)])
    for i in range(3):
        noisy = bytearray(size)
        for j in range(size):
            roll = rng.random()
            if roll > 0.90:
                noisy[j] = 0xFF
            elif roll > 0.85:
                noisy[j] = rng.randint(0x80, 0xFE)
        write_pcap(malware / f"m{i}.pcap", [bytes(noisy[j:j + 1024]) for j in range(0, size, 1024)])
    return normal, malware


def run_cli(module, argv):
    proc = subprocess.run([sys.executable, "-m", module, *argv],
                          capture_output=True, text=True)
    return proc


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("e2e")
    normal, malware = make_fixture_corpus(root)
    out = root / "ds"
    proc = run_cli("pcapvis.cli", [
        "build-dataset", "--normal", str(normal), "--malware", str(malware),
        "-o", str(out), "--chunk-size", "1024", "--seed", "3", "--jobs", "2",
    ])
    assert proc.returncode == 0, proc.stderr
    return out


def test_smoke_run_end_to_end(dataset, tmp_path):
    manifest = dataset / "manifest.jsonl"
    rows = [json.loads(l) for l in manifest.read_text().splitlines()]
    assert len(rows) >= 40
    labels = [r["label"] for r in rows]
    assert labels.count("normal") == labels.count("malware")

    run_dir = tmp_path / "run"
    config = TrainerConfig(architecture="resnet50", epochs=2, batch_size=6,
                           learning_rate=0.05, input_resize=64, seed=5,
                           pretrained=False)
    artifact, logs = train(manifest, config, run_dir)

    # epoch log: monotone epoch index, finite values
    assert [log.epoch for log in logs] == [1, 2]
    csv_logs = read_epoch_log(run_dir / "epochs.csv")
    assert [log.epoch for log in csv_logs] == [1, 2]
    for log in csv_logs:
        assert math.isfinite(log.train_loss) and math.isfinite(log.valid_loss)
        assert math.isfinite(log.accuracy)

    predictions_path = tmp_path / "predictions.jsonl"
    records = predict(artifact, manifest, predictions_path)
    n_test = sum(1 for r in rows if r["split"] == "test")
    assert len(records) == n_test
    assert all(0.0 <= r["score"] <= 1.0 for r in records)

    # the primary harness must accept the file with zero contract errors
    report_path = tmp_path / "report.json"
    proc = run_cli("pcapvis.cli", [
        "eval", "--manifest", str(manifest), "--predictions", str(predictions_path),
        "--json-out", str(report_path),
    ])
    assert proc.returncode == 0, proc.stderr
    report = json.loads(report_path.read_text())
    assert report["tp"] + report["tn"] + report["fp"] + report["fn"] == n_test

    # held-out accuracy above chance
    assert report["accuracy"] > 0.6, report
    print(f"[PASS] smoke e2e: held-out accuracy {report['accuracy']:.3f} on {n_test} images")


def test_cli_chain_runs_without_manual_edits(dataset, tmp_path):
    manifest = dataset / "manifest.jsonl"
    run_dir = tmp_path / "cli-run"
    proc = run_cli("pcapvis_trainer.cli", [
        "train", "--manifest", str(manifest), "--out-dir", str(run_dir),
        "--architecture", "resnet34", "--epochs", "1", "--batch-size", "6",
        "--input-resize", "48", "--seed", "9", "--no-pretrained",
    ])
    assert proc.returncode == 0, proc.stderr

    preds = tmp_path / "preds.jsonl"
    proc = run_cli("pcapvis_trainer.cli", [
        "predict", "--model", str(run_dir / "model.pt"),
        "--manifest", str(manifest), "--out", str(preds),
    ])
    assert proc.returncode == 0, proc.stderr

    proc = run_cli("pcapvis.cli", [
        "eval", "--manifest", str(manifest), "--predictions", str(preds),
    ])
    assert proc.returncode == 0, proc.stderr
    assert "confusion" in proc.stdout

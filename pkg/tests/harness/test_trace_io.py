from zopdkit.harness.config import preset
from zopdkit.harness.trace_io import read_summary, trace_header, write_rows, write_summary, write_trace_csv
from zopdkit.optimization.trace import IterRecord, RunTrace
import numpy as np


def small_trace(n=5):
    trace = RunTrace(n_s=1, window=2, seed=0)
    for k in range(1, n + 1):
        trace.append(
            IterRecord(
                iter=k,
                objective=0.1 * k,
                sumrate=1.0 / 3.0,
                service=np.array([0.5, 1.0]),
                utility=np.zeros(0),
                violation=np.array([0.25, -1.0]),
                lambda_s=np.zeros(0),
                lambda_r=np.array([1.0, 0.5]),
                probes=3 * k,
            )
        )
    return trace


def test_write_rows_format(tmp_path):
    path = write_rows(tmp_path / "nested" / "rows.csv", ["a", "b", "c"], [[1, 0.1, True], [np.int64(2), np.float64(1e-17), "x"]])
    assert path.read_bytes() == b"a,b,c\n1,0.1,True\n2,1e-17,x\n"
    commented = write_rows(tmp_path / "c.csv", ["a"], [[1]], comments=["seed = 3"])
    assert commented.read_bytes() == b"# seed = 3\na\n1\n"


def test_trace_csv(tmp_path):
    trace = small_trace()
    assert trace_header(trace) == [
        "iter", "objective", "sumrate", "ergodic_sumrate",
        "violation_0", "violation_1", "ergodic_violation_0", "ergodic_violation_1",
        "lambda_r_0", "lambda_r_1", "probes",
    ]
    path = write_trace_csv(trace, tmp_path / "trace.csv")
    lines = path.read_text(encoding="utf-8").split("\n")
    assert lines[0] == "# seed = 0"
    assert lines[1] == ",".join(trace_header(trace))
    assert len(lines) == 8 and lines[-1] == ""
    first = lines[2].split(",")
    assert first[0] == "1"
    assert float(first[2]) == 1.0 / 3.0
    assert first[-1] == "3"
    assert b"\r" not in path.read_bytes()


def test_empty_trace_csv(tmp_path):
    path = write_trace_csv(RunTrace(n_s=1), tmp_path / "trace.csv")
    assert path.read_text(encoding="utf-8") == "iter,objective,sumrate,ergodic_sumrate,probes\n"
    seeded = write_trace_csv(RunTrace(n_s=1, seed=42), tmp_path / "seeded.csv")
    assert seeded.read_text(encoding="utf-8").startswith("# seed = 42\niter,")


def test_summary_embeds_config(tmp_path):
    config = preset("toy")
    path = write_summary(
        tmp_path / "summary.ini",
        {"experiment": "toy", "seed": 0, "status": "completed"},
        {"learned_sumrate": 0.1 + 0.2},
        config.to_ini_text(),
    )
    parser = read_summary(path)
    assert parser["run"]["status"] == "completed"
    assert float(parser["summary"]["learned_sumrate"]) == 0.1 + 0.2
    assert parser["experiment"]["name"] == "toy"
    assert path.read_text(encoding="utf-8").endswith(config.to_ini_text())

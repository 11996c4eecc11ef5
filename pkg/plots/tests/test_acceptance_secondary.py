"""Secondary acceptance criterion: the renderer handles all three chart
kinds from fixture CSVs and fails cleanly on schema violations."""

import time

import pytest

from render_figs.cli import main

from test_render import make_ent_csv, make_fidelity_csv

pytestmark = pytest.mark.acceptance


def test_secondary_plot_script(tmp_path, capsys):
    t0 = time.perf_counter()
    fid_csv = tmp_path / "fid.csv"
    ent_csv = tmp_path / "ent.csv"
    make_fidelity_csv(fid_csv, levels=(0.9, 0.7, 0.3, 0.0), grid=20)
    make_ent_csv(ent_csv, levels=(0.0, 0.5, 1.0), grid=20)

    rendered = [
        main(["fidelity", str(fid_csv), str(tmp_path / "fid.png")]),
        main(["ent_vs_input", str(ent_csv), str(tmp_path / "ei.svg")]),
        main(["ent_vs_channel", str(ent_csv), str(tmp_path / "ec.png")]),
    ]
    files_ok = all((tmp_path / name).stat().st_size > 0
                   for name in ("fid.png", "ei.svg", "ec.png"))
    rejected = [
        main(["fidelity", str(ent_csv), str(tmp_path / "x.png")]),
        main(["ent_vs_input", str(tmp_path / "missing.csv"), str(tmp_path / "x.png")]),
        main(["surface", str(ent_csv), str(tmp_path / "x.png")]),
    ]
    elapsed = time.perf_counter() - t0

    ok = rendered == [0, 0, 0] and files_ok and rejected == [1, 1, 1]
    status = "PASS" if ok else "FAIL"
    with capsys.disabled():
        print(f"\n{status}  acceptance plot-script: three kinds rendered "
              f"{rendered}, schema violations rejected {rejected} [{elapsed:.2f}s]")
    assert ok

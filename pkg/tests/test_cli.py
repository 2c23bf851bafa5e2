import os

import pytest

from picardgeo.cli import (
    ConfigError,
    EXIT_CONFIG,
    EXIT_OK,
    export_table,
    main,
    parse_grid,
)


def test_parse_grid_forms():
    assert parse_grid("1:3:1") == [1.0, 2.0, 3.0]
    assert parse_grid("2,5,9") == [2.0, 5.0, 9.0]
    with pytest.raises(ConfigError):
        parse_grid("1:2")
    with pytest.raises(ConfigError):
        parse_grid("5:1:1")


def test_export_table(tmp_path):
    path = tmp_path / "t.csv"
    export_table([(1.0, "a"), (2.5, "b")], ["x", "name"], path)
    text = path.read_bytes()
    assert text == b"x,name\n1,a\n2.5,b\n"
    export_table([], ["only", "header"], path)
    assert path.read_text() == "only,header\n"


def test_export_table_rejects_mismatched_schema(tmp_path):
    path = tmp_path / "t.csv"
    with pytest.raises(ConfigError):
        export_table([(1.0,)], ["a", "b"], path)
    assert not path.exists()  # nothing written before validation


def test_export_table_significant_digits(tmp_path):
    path = tmp_path / "t.csv"
    export_table([(0.1234567890123456789,)], ["v"], path)
    assert path.read_text() == "v\n0.123456789012346\n"


def test_cli_kloosterman_single(capsys):
    code = main(["kloosterman", "--m", "1", "--n", "1", "--c", "1+1i"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "S(1,1;1+1i) = 1" in out
    assert "0.3535" in out  # weil ratio 1/(2 sqrt 2)


def test_cli_kloosterman_scan(tmp_path):
    code = main(
        ["kloosterman", "--m", "1", "--n", "2", "--norm-max", "20",
         "--out", str(tmp_path)]
    )
    assert code == EXIT_OK
    lines = (tmp_path / "kloosterman.csv").read_text().splitlines()
    assert lines[0] == "c,norm_c,value,weil_ratio"
    assert len(lines) > 10


def test_cli_bad_literal_is_config_error(capsys):
    code = main(["kloosterman", "--m", "2+x", "--n", "1", "--c", "3"])
    assert code == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_cli_census_and_psi(tmp_path):
    code = main(
        ["census", "--x-max", "30", "--out", str(tmp_path),
         "--export", str(tmp_path / "c.csv")]
    )
    assert code == EXIT_OK
    csv_path = tmp_path / "c.csv"
    header = csv_path.read_text().splitlines()[0]
    assert header == "d_re,d_im,t0_re,t0_im,u0_re,u0_im,abs_eps,h,k,norm,lambda_weight"

    code = main(
        ["psi", "--census-file", str(csv_path), "--grid", "5:25:5",
         "--out", str(tmp_path)]
    )
    assert code == EXIT_OK
    rows = (tmp_path / "psi.csv").read_text().splitlines()
    assert rows[0] == "X,psi,main_term,error"
    psis = [float(r.split(",")[1]) for r in rows[1:]]
    assert psis == sorted(psis)


def test_cli_census_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["census", "--x-max", "30", "--export", str(a)]) == EXIT_OK
    assert main(
        ["census", "--x-max", "30", "--threads", "2", "--export", str(b)]
    ) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_cli_transforms(tmp_path):
    code = main(
        ["transforms", "--s-values", "1,2", "--t-max-single", "8",
         "--out", str(tmp_path)]
    )
    assert code == EXIT_OK
    assert (tmp_path / "h_window.csv").exists()
    assert (tmp_path / "i_transform.csv").exists()

import numpy as np
import pytest

from ppcf_game.analytic import ErrorReport
from ppcf_game.cli import EXIT_CONFIG, EXIT_OK, EXIT_SELFCHECK, main
from ppcf_game.config import ConfigError, build_spec, load_spec, parse_spec, parse_text
from ppcf_game.field import Box

SMALL = ["--epsilon", "0.2", "--grid-h", "0.1", "--l0", "8", "--r0", "4", "--horizon", "0.12",
         "--domain=-1.5,-1.5,1.5,1.5", "--scale", "0.5"]


def test_parse_text_comments_and_types():
    vals = parse_text("# header\ngamma = 0.8\nl0=40  # directions\n\nbenchmark=ellipse\n")
    assert vals == {"gamma": 0.8, "l0": 40, "benchmark": "ellipse"}


@pytest.mark.parametrize("text", ["gamma 0.7", "colour=red", "l0=4.5", "gamma=abc"])
def test_parse_text_errors(text):
    with pytest.raises(ConfigError):
        parse_text(text)


def test_defaults_are_table1():
    spec = build_spec({})
    g = spec.game
    assert (g.gamma, g.epsilon, g.h, g.l0, g.ds, g.scale, g.horizon_T) == (0.7, 0.08, 0.01, 160, 0.01, 0.9, 0.12)
    assert g.r0 is None and g.domain == Box(-2, -2, 2, 2)
    assert g.contour_level == 0.07


def test_r0_and_alphas_replace_defaults():
    g = build_spec({"r0": 50, "alpha1": 0.3, "alpha2": 0.1}).game
    assert (g.r0, g.ds, g.scale, g.alpha1, g.alpha2) == (50, None, None, 0.3, 0.1)


def test_ellipse_switches_exterior():
    assert build_spec({"benchmark": "ellipse"}).game.outside == "analytic"
    assert build_spec({"benchmark": "ellipse", "outside": "clamp"}).game.outside == "clamp"


@pytest.mark.parametrize("values", [{"emit": "fields,pictures"}, {"benchmark": "square"},
                                    {"outside": "mirror"}, {"domain_min_x": 3.0}])
def test_build_spec_errors(values):
    with pytest.raises(ConfigError):
        build_spec(values)


def test_spec_text_round_trip(tmp_path):
    spec = parse_spec("gamma=0.8\nepsilon=0.05\nr0=20\nemit=fields,errors\nsnapshots=0,3\neval_box=-1,-1,1,1\n")
    again = parse_spec(spec.to_text())
    assert again == spec
    path = tmp_path / "e.cfg"
    path.write_text(spec.to_text())
    assert load_spec(path, {"gamma": 0.9}).game.gamma == 0.9


def test_cli_solve_outputs(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["solve", *SMALL, "--emit", "fields,contours,errors", "--out", str(out)])
    assert code == EXIT_OK
    text = capsys.readouterr().out
    assert "steps=3 realized_horizon=0.12" in text
    assert "sup_linf=" in text
    rep = ErrorReport.from_csv((out / "errors.csv").read_text())
    assert [r[0] for r in rep.per_step] == [0, 1, 2, 3]
    for name in ("experiment.cfg", "field_k0.csv", "field_k3.csv", "contour_k1.csv", "contour_k3.svg",
                 "shape.csv", "errors.png", "contours.png"):
        assert (out / name).exists(), name
    field = np.loadtxt(out / "field_k3.csv", delimiter=",", skiprows=1)
    assert field.shape == (31 * 31, 3)
    assert load_spec(out / "experiment.cfg").game.l0 == 8


def test_cli_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "x.cfg"
    cfg.write_text("epsilon=0.2\nh=0.1\nl0=8\nr0=4\nhorizon_T=0.08\nscale=0.5\n"
                   "domain_min_x=-1\ndomain_min_y=-1\ndomain_max_x=1\ndomain_max_y=1\n")
    code = main(["solve", "--config", str(cfg), "--horizon", "0.04", "--no-figures", "--out", str(tmp_path / "o")])
    assert code == EXIT_OK
    assert "steps=1 " in capsys.readouterr().out
    assert not (tmp_path / "o" / "errors.png").exists()


def test_cli_config_errors(tmp_path, capsys):
    assert main(["solve", "--gamma", "0.2", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["solve", "--epsilon", "0.5", "--horizon", "0.1", "--out", str(tmp_path)]) == EXIT_CONFIG
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense\n")
    assert main(["solve", "--config", str(bad)]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_cli_scaling_warning(tmp_path, capsys):
    main(["solve", *SMALL, "--no-figures", "--out", str(tmp_path)])
    assert "warning:" in capsys.readouterr().err


def test_cli_ellipse_shape(tmp_path, capsys):
    out = tmp_path / "ell"
    code = main(["solve", *SMALL, "--gamma", "0.9", "--benchmark", "ellipse", "--out", str(out)])
    assert code == EXIT_OK
    assert "sup_linf=nan" in capsys.readouterr().out
    rows = (out / "shape.csv").read_text().splitlines()
    assert rows[0].startswith("k,t,mean_radius")
    assert len(rows) == 1 + 4


def test_cli_table_subset(tmp_path, capsys):
    code = main(["table", "2", "--only", "0.16", "--horizon", "0.0128", "--r0", "10", "--l0", "16",
                 "--out", str(tmp_path)])
    assert code == EXIT_OK
    text = capsys.readouterr().out
    assert "h=0.16" in text and "0.2639" in text
    csv = (tmp_path / "table2.csv").read_text().splitlines()
    assert csv[0] == "h,linf_error,l1_error" and csv[1].startswith("0.16,")
    assert (tmp_path / "table2.png").exists()


def test_cli_figure_small(tmp_path, capsys):
    code = main(["figure", "1", "--epsilon", "0.2", "--grid-h", "0.1", "--l0", "8", "--r0", "4",
                 "--out", str(tmp_path)])
    assert code == EXIT_OK
    assert (tmp_path / "contours.png").exists()
    for k in (0, 6, 12):
        assert (tmp_path / f"contour_k{k}.svg").exists()


def test_cli_selfcheck(capsys):
    assert main(["selfcheck"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5 and all(line.startswith("PASS") for line in lines)


def test_cli_selfcheck_detects_wrong_cost(capsys):
    assert main(["selfcheck", "--perturb-c-gamma", "1.01"]) == EXIT_SELFCHECK
    assert capsys.readouterr().out.startswith("FAIL sup-representation")

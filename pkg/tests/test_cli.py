import logging
from types import SimpleNamespace

import pytest
import yaml
from click.testing import CliRunner

from plurihull import cli


@pytest.fixture(autouse=True)
def quiet_environment(monkeypatch, mocker):
    monkeypatch.delenv("PLURIHULL_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("PLURIHULL_THREADS", raising=False)
    mocker.patch("plurihull.cli.load_dotenv")


@pytest.fixture
def workflow(mocker):
    workflow = mocker.Mock()
    workflow.run.return_value = ["did the work"]
    mocker.patch("plurihull.cli.get_workflow", return_value=workflow)
    return workflow


def test_main_dispatches_command(tmp_path, workflow):
    runner = CliRunner()

    result = runner.invoke(
        cli.main, ["extend", "--phi", "builtin:cos", "--dk", "2", "--output", str(tmp_path)]
    )

    assert result.exit_code == 0
    conf = workflow.run.call_args.args[0]
    assert conf.command == "extend"
    assert conf.input == "builtin:cos"
    assert conf.degrees == [2]
    assert conf.N == 256
    assert conf.output == str(tmp_path)


def test_main_collects_repeated_options(tmp_path, workflow):
    runner = CliRunner()

    result = runner.invoke(
        cli.main,
        [
            "module_constants",
            "--phi",
            "builtin:inverse",
            "--z",
            "0.5",
            "--z",
            "0.3+0.1i",
            "--lam",
            "2",
            "--lam",
            "extend",
            "--degrees",
            "4,8,16",
            "--tol",
            "feas_tol=1e-9",
            "--output",
            str(tmp_path),
        ],
    )

    assert result.exit_code == 0
    conf = workflow.run.call_args.args[0]
    assert conf.command == "module-constants"
    assert conf.points == [0.5 + 0j, 0.3 + 0.1j]
    assert conf.lambdas == [2 + 0j, "extend"]
    assert conf.degrees == [4, 8, 16]
    assert conf.tolerances["feas_tol"] == 1e-9


@pytest.mark.parametrize(
    "args, message",
    [
        (["deploy"], "Invalid command: deploy"),
        (["extend", "--phi", "builtin:cos", "--dk", "2", "--dmax", "4"], "Use only one of"),
        (["extend", "--phi", "builtin:cos", "--tol", "feas_tol"], "--tol expects name=value"),
        (["extend", "--phi", "builtin:cos", "--N", "100"], "power of two"),
        (["classify"], "needs an input"),
    ],
)
def test_usage_errors_exit_with_code_2(args, message, workflow):
    result = CliRunner().invoke(cli.main, args)

    assert result.exit_code == 2
    assert message in result.output
    workflow.run.assert_not_called()


def test_bad_config_key_is_a_usage_error(tmp_path, workflow):
    config_path = tmp_path / "run.yml"
    config_path.write_text(yaml.safe_dump({"comand": "extend"}))

    result = CliRunner().invoke(cli.main, ["extend", "--config", str(config_path)])

    assert result.exit_code == 2
    assert "Unknown config keys: comand" in result.output


def test_failing_workflow_exits_with_code_1(tmp_path, workflow, caplog):
    workflow.run.side_effect = RuntimeError("solver exploded")

    with caplog.at_level(logging.INFO):
        result = CliRunner().invoke(
            cli.main, ["extend", "--phi", "builtin:cos", "--output", str(tmp_path)]
        )

    assert result.exit_code == 1
    assert "Error running extend" in caplog.text
    assert "solver exploded" in caplog.text


def test_extend_end_to_end(tmp_path):
    output = tmp_path / "run"

    result = CliRunner().invoke(
        cli.main,
        ["extend", "--phi", "builtin:cos", "--dk", "2", "--N", "256", "--output", str(output)],
    )

    assert result.exit_code == 0
    lines = (output / "poles_dk2.csv").read_text().splitlines()
    assert lines[0] == "re,im,multiplicity"
    assert len(lines) == 2
    assert lines[1].endswith(",1")


def test_run_reports_steps_and_success(workflow, caplog):
    conf = SimpleNamespace(command="corpus")

    with caplog.at_level(logging.INFO):
        cli.run(conf)

    assert "✓ did the work" in caplog.text
    assert "✅ corpus completed in" in caplog.text


def test_config_version_warning_only_for_old_files(tmp_path, workflow, caplog):
    old = tmp_path / "old.yml"
    old.write_text(yaml.safe_dump({"command": "corpus"}))
    current = tmp_path / "current.yml"
    current.write_text(yaml.safe_dump({"config_version": 1, "command": "corpus"}))
    runner = CliRunner()

    with caplog.at_level(logging.INFO):
        runner.invoke(cli.main, ["corpus", "--config", str(current)])
        runner.invoke(cli.main, ["corpus"])
    assert "compatibility warning" not in caplog.text

    with caplog.at_level(logging.INFO):
        result = runner.invoke(cli.main, ["corpus", "--config", str(old)])

    assert result.exit_code == 0
    assert "plurihull compatibility warning" in caplog.text
    assert "config_version: 1" in caplog.text


def test_helpers():
    assert cli._joined(()) is None
    assert cli._joined(("0.5", "1+1i")) == "0.5,1+1i"
    assert cli._tolerances(()) is None
    assert cli._tolerances(("null_tol = 1e-12",)) == {"null_tol": "1e-12"}
    assert cli._degrees(None, None, 6) == "6"
    assert cli._degrees(None, None, None) is None

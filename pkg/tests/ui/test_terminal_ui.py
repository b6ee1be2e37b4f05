import pytest

from core.config_manager import ConfigManager
from scenario_handler import ScenarioHandler
from ui.terminal_ui import AccelwaveTerminalUI, print_result, print_run_summary


@pytest.fixture
def shell(settings_path):
    config_manager = ConfigManager(settings_path)
    return AccelwaveTerminalUI(ScenarioHandler(config_manager), config_manager)


class TestShell:
    def test_listings(self, shell, capsys):
        shell.onecmd("presets")
        shell.onecmd("families")
        out = capsys.readouterr().out
        assert "fig1" in out
        assert "ConstIntensityPowerLaw" in out

    def test_describe(self, shell, capsys):
        shell.onecmd("describe DarkSoliton sigma=1 a=1")
        out = capsys.readouterr().out
        assert "=== DarkSoliton ===" in out
        assert "PT symmetric" in out

    def test_describe_error(self, shell, capsys):
        shell.onecmd("describe DarkSoliton sigma=0 a=1")
        assert "ValidationError" in capsys.readouterr().out

    def test_settings_and_exit(self, shell, capsys):
        shell.onecmd("settings")
        assert "output_dir" in capsys.readouterr().out
        assert shell.onecmd("exit") is True


class TestPrinting:
    def test_error_result(self, capsys):
        print_result({"status": "error", "error": "Overflow", "message": "max|Psi| above ceiling"})
        assert "Overflow: max|Psi| above ceiling" in capsys.readouterr().out

    def test_propagate_summary(self, capsys):
        print_run_summary({"fit": {"acc": 0.998, "expected_acc": 1.0, "acc_rel_error": 0.002, "rms_residual": 1e-6},
                           "norm_ratio": 1.0, "gain_loss": {"character": "mixed"}})
        out = capsys.readouterr().out
        assert "fitted acceleration" in out
        assert "mixed" in out

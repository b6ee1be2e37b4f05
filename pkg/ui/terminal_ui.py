import cmd
import os
import logging
import shlex
from typing import Any, Dict, List

from core.utils import Colors, StatusIcons, format_number, print_table


# ============================= Result Printing =============================

def print_ladders(decisions: List[Dict[str, Any]]) -> None:
    """One residual-ladder table per adjudicated parameter"""
    for decision in decisions:
        rows = []
        for ladder in decision.get("ladders", []):
            for level in ladder["levels"]:
                rows.append([format_number(ladder["value"]), format_number(level["grid_step"]),
                             format_number(level["l_inf"]), format_number(level["l2"]),
                             format_number(ladder["convergence_order"], 3),
                             "yes" if ladder["converged"] else "no"])
        selected = decision.get("selected")
        title = f"{decision.get('parameter')}: selected {format_number(selected) if selected is not None else 'none'}"
        print_table(["value", "h", "L_inf", "L2", "order", "converged"], rows, title)


def print_run_summary(summary: Dict[str, Any]) -> None:
    """Key diagnostics of a propagate, sweep, adjudicate or synthesize run"""
    if "ladders" in summary:
        print_ladders(summary["ladders"])
        return

    if "runs" in summary:
        rows = []
        errors = summary.get("acc_rel_errors") or [None] * len(summary["runs"])
        for run, err in zip(summary["runs"], errors):
            rows.append([format_number(run["value"]), run["status"], run["dir"], format_number(err)])
        print_table(["value", "status", "dir", "acc rel. error"], rows, f"Sweep over {summary['parameter']}")
        if "acc_error_monotonic" in summary:
            print(f"Acceleration error monotonic: {summary['acc_error_monotonic']}")
        for comparison in summary.get("final_comparison", []):
            print(f"{StatusIcons.INFO} value {format_number(comparison['value'])} vs first: "
                  f"L_inf {format_number(comparison['l_inf'])} after phase alignment")
        return

    rows = []
    fit = summary.get("fit", {})
    if "acc" in fit:
        rows.append(["fitted acceleration", format_number(fit["acc"])])
        rows.append(["expected acceleration", format_number(fit["expected_acc"])])
        if "acc_rel_error" in fit:
            rows.append(["relative error", format_number(fit["acc_rel_error"])])
        rows.append(["fit rms residual", format_number(fit["rms_residual"])])
    if summary.get("shape_error"):
        rows.append([f"shape error (t={format_number(summary['shape_error']['t'])})",
                     format_number(summary["shape_error"]["max_abs"])])
    if summary.get("flatness_max") is not None:
        rows.append(["max interior flatness", format_number(summary["flatness_max"])])
    if summary.get("analytic_final"):
        rows.append(["final L_inf vs exact", format_number(summary["analytic_final"]["l_inf"])])
    if summary.get("ehrenfest"):
        rows.append(["Ehrenfest residual (mean)", format_number(summary["ehrenfest"]["mean"])])
    if summary.get("norm_ratio") is not None:
        rows.append(["N(t_end) / N(0)", format_number(summary["norm_ratio"])])
    if summary.get("gain_loss"):
        rows.append(["gain/loss character", summary["gain_loss"]["character"]])
    if "closed_form_check" in summary:
        rows.append(["max |V_I - closed form|", format_number(summary["closed_form_check"]["v_imag_max_error"])])
        rows.append(["max |G - closed form|", format_number(summary["closed_form_check"]["g_max_error"])])
    if "residual_G" in summary:
        rows.append(["G residual L_inf", format_number(summary["residual_G"]["l_inf"])])
    if rows:
        print_table(["diagnostic", "value"], rows)


def print_result(result: Dict[str, Any]) -> None:
    """Print a ScenarioHandler status dict"""
    if result.get("status") == "ok":
        if "out_dir" in result:
            print(f"{StatusIcons.SUCCESS} {result.get('name')} finished, artifacts in {result['out_dir']}")
    else:
        print(f"{StatusIcons.ERROR} {result.get('error', 'Error')}: {result.get('message', 'Unknown error')}")
    if result.get("summary"):
        print_run_summary(result["summary"])


class AccelwaveTerminalUI(cmd.Cmd):
    """
    Interactive shell for accelwave

    Commands delegate to the ScenarioHandler and print its status dictionaries.
    """

    VERSION = "1.0.0"
    intro = None

    BANNER = f'''
    {Colors.CYAN}accelwave{Colors.END} - accelerating waves in non-Hermitian potentials
    ===========================================================
    '''

    WELCOME_MSG = '''
    Type 'help' to see available commands

    SCENARIOS:                     INFORMATION:
    - run <config>                 - presets
    - preset <name>                - families
    - adjudicate [claim ...]       - describe <family> [key=value ...]
    - synthesize [table]           - settings
                                   - exit
    '''

    def __init__(self, scenario_handler, config_manager):
        super().__init__()
        self.prompt = 'accelwave> '
        self.scenario_handler = scenario_handler
        self.config_manager = config_manager
        self.logger = logging.getLogger(__name__)

    def preloop(self):
        self.display_layout()

    def display_layout(self):
        os.system('cls' if os.name == 'nt' else 'clear')
        print(self.BANNER)
        print(self.WELCOME_MSG)

    def _split(self, arg: str) -> List[str]:
        try:
            return shlex.split(arg)
        except ValueError as e:
            print(f"{StatusIcons.ERROR} Could not parse arguments: {e}")
            return []

    def emptyline(self):
        pass

    # ============================= Scenario Commands =============================

    def do_run(self, arg):
        """
        Run a scenario config file
        Usage: run <config> [out_dir]
        """
        args = self._split(arg)
        if not args:
            print("Invalid arguments. Usage: run <config> [out_dir]")
            return
        print(f"\n{StatusIcons.LOADING} Running {args[0]}...")
        print_result(self.scenario_handler.run_config(args[0], args[1] if len(args) > 1 else None))

    def do_preset(self, arg):
        """
        Run a shipped preset
        Usage: preset <name> [out_dir]
        """
        args = self._split(arg)
        if not args:
            print("Invalid arguments. Usage: preset <name> [out_dir]")
            return
        print(f"\n{StatusIcons.LOADING} Running preset {args[0]}...")
        print_result(self.scenario_handler.run_preset(args[0], args[1] if len(args) > 1 else None))

    def do_adjudicate(self, arg):
        """
        Run the residual-ladder adjudications
        Usage: adjudicate [dark_soliton_mu] [c_shift]
        """
        claims = self._split(arg)
        print(f"\n{StatusIcons.LOADING} Adjudicating {', '.join(claims) or 'all claims'}...")
        print_result(self.scenario_handler.adjudicate(claims=claims or None))

    def do_synthesize(self, arg):
        """
        Synthesize G and V_I for an envelope table (q, psi[, v_real] columns)
        Usage: synthesize [table.csv]
        """
        args = self._split(arg)
        print(f"\n{StatusIcons.LOADING} Synthesizing...")
        print_result(self.scenario_handler.synthesize(args[0] if args else None))

    # ============================= Information Commands =============================

    def do_presets(self, arg):
        """List the shipped presets"""
        result = self.scenario_handler.list_presets()
        print_table(["preset", "description"], [[name, text] for name, text in result["presets"].items()])

    def do_families(self, arg):
        """List the solution families and their parameters"""
        result = self.scenario_handler.list_families()
        print_table(["family", "parameters"],
                    [[tag, ", ".join(params)] for tag, params in result["families"].items()])

    def do_describe(self, arg):
        """
        Describe a solution family
        Usage: describe <family> [key=value ...]
        """
        args = self._split(arg)
        if not args:
            print("Invalid arguments. Usage: describe <family> [key=value ...]")
            return
        result = self.scenario_handler.describe(args[0], args[1:])
        if result["status"] != "ok":
            print_result(result)
            return
        doc = result["description"]
        print(f"\n=== {doc['family']} ===")
        for name, formula in doc["closed_forms"].items():
            print(f"• {name} = {formula}")
        print(f"• gain/loss: {doc['gain_loss']['character']}")
        print(f"• PT symmetric: {doc['pt_symmetric']}")
        for key, value in doc["notes"].items():
            print(f"• {key}: {value}")

    def do_settings(self, arg):
        """Show the resolved run settings"""
        settings = self.config_manager.run_settings()
        print_table(["setting", "value"], [[key, value] for key, value in settings.items()])

    # ============================= Utility Commands =============================

    def do_clear(self, arg):
        """Clear the terminal screen"""
        self.display_layout()

    def do_exit(self, arg):
        """Exit the shell"""
        return True

    def do_EOF(self, arg):
        """Exit on Ctrl+D"""
        print()
        return True

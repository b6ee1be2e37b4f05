#!/usr/bin/env python3

import argparse
import json
import sys

from core.config_manager import ConfigManager
from core.utils import setup_logging, to_jsonable
from scenario_handler import EXIT_OK, EXIT_RUNTIME, ScenarioHandler, exit_code
from ui.terminal_ui import AccelwaveTerminalUI, print_result


def parse_arguments(argv=None):
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(description='accelwave: accelerating waves in non-Hermitian potentials')
    parser.add_argument('-c', '--config', type=str, default='accelwave_config.json',
                        help='Path to the settings file')
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='Enable verbose logging')
    parser.add_argument('--log-file', type=str,
                        help='Path to log file')

    run_flags = argparse.ArgumentParser(add_help=False)
    run_flags.add_argument('--out', type=str, help='Output directory')
    run_flags.add_argument('--scheme', choices=['split-step', 'crank-nicolson'],
                           help='Override the time stepper')
    run_flags.add_argument('--resolution-scale', type=float,
                           help='Refine grid points and time step by this factor')
    run_flags.add_argument('--sweep', action='store_true',
                           help='Run sweep values concurrently')

    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', parents=[run_flags], help='Run a scenario config file')
    run.add_argument('config_file', help='Scenario config')

    preset = commands.add_parser('preset', parents=[run_flags], help='Run a shipped preset')
    preset.add_argument('name', help='Preset name (see "list")')

    adjudicate = commands.add_parser('adjudicate', help='Residual-ladder adjudication of the frozen constants')
    adjudicate.add_argument('claims', nargs='*', default=[],
                            help='dark_soliton_mu and/or c_shift (all by default)')
    adjudicate.add_argument('--out', type=str, help='Output directory')
    adjudicate.add_argument('--workers', type=int, help='Candidates evaluated concurrently')

    synthesize = commands.add_parser('synthesize', help='G and V_I for a tabulated envelope')
    synthesize.add_argument('table', nargs='?', help='CSV with q, psi[, v_real] columns (Gaussian preset if omitted)')
    synthesize.add_argument('--out', type=str, help='Output directory')
    synthesize.add_argument('--a', type=float, help='Acceleration')
    synthesize.add_argument('--mu', type=float, help='Frame constant')

    describe = commands.add_parser('describe', help='Closed forms and constants of a family')
    describe.add_argument('family', help='Family tag')
    describe.add_argument('params', nargs='*', help='key=value parameters')

    commands.add_parser('list', help='List presets and families')
    commands.add_parser('shell', help='Interactive shell')

    return parser.parse_args(argv)


def run_command(args, handler: ScenarioHandler, config_manager: ConfigManager) -> int:
    run_options = {}
    if args.command in ('run', 'preset'):
        run_options = {"scheme": args.scheme, "resolution_scale": args.resolution_scale,
                       "concurrent_sweep": args.sweep}

    if args.command == 'run':
        result = handler.run_config(args.config_file, args.out, **run_options)
    elif args.command == 'preset':
        result = handler.run_preset(args.name, args.out, **run_options)
    elif args.command == 'adjudicate':
        result = handler.adjudicate(args.out, claims=args.claims or None, workers=args.workers)
    elif args.command == 'synthesize':
        result = handler.synthesize(args.table, args.out, a=args.a, mu=args.mu)
    elif args.command == 'describe':
        result = handler.describe(args.family, args.params)
        if result["status"] == "ok":
            print(json.dumps(to_jsonable(result["description"]), indent=2))
            return EXIT_OK
    elif args.command == 'list':
        terminal = AccelwaveTerminalUI(handler, config_manager)
        terminal.do_presets("")
        terminal.do_families("")
        return EXIT_OK
    else:
        AccelwaveTerminalUI(handler, config_manager).cmdloop()
        return EXIT_OK

    print_result(result)
    return exit_code(result)


def main(argv=None) -> int:
    """Main entry point for the application"""
    args = parse_arguments(argv)

    config_manager = ConfigManager(args.config)
    log_level = "DEBUG" if args.verbose else config_manager.get("log_level")
    logger = setup_logging(log_level, args.log_file)
    logger.info(f"Starting accelwave {args.command}")

    handler = ScenarioHandler(config_manager)
    try:
        code = run_command(args, handler, config_manager)
    except KeyboardInterrupt:
        logger.info("Shutting down due to keyboard interrupt")
        code = EXIT_RUNTIME
    except Exception as e:
        logger.error(f"Error in main: {e}", exc_info=True)
        code = EXIT_RUNTIME

    logger.info(f"accelwave {args.command} finished with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())

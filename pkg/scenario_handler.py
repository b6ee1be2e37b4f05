import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from core.config_manager import ConfigManager
from core.errors import AccelwaveError, ParseError, ValidationError
from experiments.config_parser import load_config
from experiments.presets import load_preset, preset_summaries
from experiments.runner import RunResult, ScenarioRunner
from experiments.scenario import ScenarioSpec
from solutions.describe import describe
from solutions.families import FAMILY_PARAMS, family_from_mapping

# Exit codes of the command-line surface
EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3

VALIDATION_ERRORS = (ParseError.__name__, ValidationError.__name__)


def exit_code(result: Dict[str, Any]) -> int:
    """Map a status dict onto the CLI exit code"""
    if result.get("status") == "ok":
        return EXIT_OK
    return EXIT_VALIDATION if result.get("error") in VALIDATION_ERRORS else EXIT_RUNTIME


def parse_params(tokens: List[str]) -> Dict[str, float]:
    """Turn ["a=1", "mu=0.25"] into {"a": 1.0, "mu": 0.25}"""
    params = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep or not key.strip():
            raise ValidationError(f"expected key=value, got {token!r}", invariant="key=value parameters")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise ValidationError(f"parameter {key.strip()!r} must be a number, got {value!r}",
                                  invariant="numeric parameters") from None
    return params


class ScenarioHandler:
    """
    Coordinates scenario runs for the argparse CLI and the terminal shell.

    Every public method returns a {"status": "ok" | "error", ...} dictionary;
    library errors are caught and logged here.
    """

    def __init__(self, config_manager: Optional[ConfigManager] = None):
        self.config_manager = config_manager or ConfigManager()
        self.logger = logging.getLogger(__name__)

    def _runner(self, scheme: Optional[str] = None, resolution_scale: Optional[float] = None,
                concurrent_sweep: bool = False) -> ScenarioRunner:
        settings = self.config_manager.run_settings()
        scheme = scheme or self.config_manager.override("scheme")
        resolution_scale = resolution_scale or float(settings["resolution_scale"])
        workers = int(settings["fft_workers"])
        settings.update({"scheme_override": scheme, "resolution_scale": resolution_scale,
                         "fft_workers": workers, "concurrent_sweep": concurrent_sweep})
        return ScenarioRunner(output_root=settings["output_dir"], scheme=scheme, resolution_scale=resolution_scale,
                              concurrent_sweep=concurrent_sweep, fft_workers=workers if workers > 1 else None,
                              settings=settings)

    @staticmethod
    def _result(run: RunResult) -> Dict[str, Any]:
        result = run.to_dict()
        if run.error:
            result["error"] = run.error.get("error")
            result["message"] = run.error.get("message")
        return result

    def _error(self, exc: AccelwaveError) -> Dict[str, Any]:
        self.logger.error(f"{type(exc).__name__}: {exc.message}")
        return exc.to_dict()

    def _execute(self, spec: ScenarioSpec, out: Optional[str], **options) -> Dict[str, Any]:
        try:
            run = self._runner(**options).run(spec, Path(out) if out else None)
        except AccelwaveError as exc:
            return self._error(exc)
        return self._result(run)

    # ============================= Scenario Methods =============================

    def run_config(self, path: str, out: Optional[str] = None, **options) -> Dict[str, Any]:
        """Run the scenario in a config file"""
        try:
            spec = load_config(path)
        except AccelwaveError as exc:
            return self._error(exc)
        return self._execute(spec, out, **options)

    def run_preset(self, name: str, out: Optional[str] = None, **options) -> Dict[str, Any]:
        """Run a shipped preset by name"""
        try:
            spec = load_preset(name)
        except AccelwaveError as exc:
            return self._error(exc)
        return self._execute(spec, out, **options)

    def adjudicate(self, out: Optional[str] = None, claims: Optional[List[str]] = None,
                   workers: Optional[int] = None) -> Dict[str, Any]:
        """Run the residual-ladder adjudications (both shipped claims by default)"""
        try:
            spec = load_preset("adjudicate")
            if claims:
                spec = spec.with_value("adjudicate.claims", list(claims))
            if workers:
                spec = spec.with_value("adjudicate.workers", workers)
        except AccelwaveError as exc:
            return self._error(exc)
        return self._execute(spec, out)

    def synthesize(self, table: Optional[str] = None, out: Optional[str] = None, a: Optional[float] = None,
                   mu: Optional[float] = None) -> Dict[str, Any]:
        """(G, V_I) profiles for a tabulated envelope (q, psi[, v_real] columns)"""
        try:
            spec = load_preset("synthesize")
            if table:
                spec = spec.with_value("synthesize.table", table)
            if a is not None:
                spec = spec.with_value("synthesize.a", a)
            if mu is not None:
                spec = spec.with_value("synthesize.mu", mu)
        except AccelwaveError as exc:
            return self._error(exc)
        return self._execute(spec, out)

    # ============================= Information Methods =============================

    def describe(self, tag: str, params: Union[Dict[str, Any], List[str], None] = None) -> Dict[str, Any]:
        """Closed forms and derived constants of a family (params as a mapping or key=value tokens)"""
        try:
            if isinstance(params, list):
                params = parse_params(params)
            family = family_from_mapping(tag, params or {})
            return {"status": "ok", "description": describe(family)}
        except AccelwaveError as exc:
            return self._error(exc)

    def list_presets(self) -> Dict[str, Any]:
        return {"status": "ok", "presets": preset_summaries()}

    def list_families(self) -> Dict[str, Any]:
        return {"status": "ok", "families": {tag: list(params) for tag, params in FAMILY_PARAMS.items()}}

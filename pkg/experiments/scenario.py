"""
Scenario models.

Every `[section]` of a scenario config maps onto one pydantic model below;
unknown keys are rejected and invariants are checked by validators.
"""

from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, confloat, conint, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from core.errors import ValidationError
from propagation.grid import MIN_POINTS, Grid1D
from propagation.potential import Absorber, NonlinearTerm
from propagation.propagator import PropagatorConfig
from solutions.families import SolutionFamily, family_from_mapping

SCENARIO_KINDS = ("propagate", "adjudicate", "synthesize")
TRACK_MODES = ("peak", "centroid", "minimum", "source")
CLAIMS = ("dark_soliton_mu", "c_shift")


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ScenarioSection(Section):
    name: str = Field(..., description="Scenario name, also the default output subdirectory")
    kind: Literal["propagate", "adjudicate", "synthesize"] = Field(
        default="propagate",
        description="Which pipeline the scenario runs"
    )
    description: Optional[str] = Field(default=None, description="Free text copied to the manifest")

    @field_validator("description", mode="before")
    def join_description(cls, v):
        # the config tokenizer splits on commas
        return ", ".join(v) if isinstance(v, list) else v


class FamilySection(Section):
    tag: str = Field(..., description="Solution family tag (e.g. 'GaussianLocalized')")
    a: Optional[float] = Field(default=None, description="Acceleration")
    mu: Optional[float] = Field(default=None, description="Frame constant (where the family takes it)")
    V0: Optional[float] = Field(default=None, description="Potential strength of the constant-intensity families")
    n: Optional[int] = Field(default=None, description="Even power of the power-law family")
    omega: Optional[float] = Field(default=None, description="Gaussian width parameter")
    sigma: Optional[float] = Field(default=None, description="Dark-soliton inverse width")

    def params(self) -> Dict[str, Any]:
        return {key: value for key, value in self.model_dump(exclude={"tag"}).items() if value is not None}

    @model_validator(mode="after")
    def check_family(self):
        # raises core.errors.ValidationError naming the violated invariant
        self.build()
        return self

    def build(self) -> SolutionFamily:
        return family_from_mapping(self.tag, self.params())


class GridSection(Section):
    x_min: float = Field(..., description="Left end of the periodic domain")
    x_max: float = Field(..., description="Right end of the periodic domain (identified with x_min)")
    n: conint(ge=MIN_POINTS) = Field(..., description=f"Number of grid points (at least {MIN_POINTS})")

    @model_validator(mode="after")
    def check_extent(self):
        if self.x_max <= self.x_min:
            raise ValueError("x_max must be greater than x_min")
        return self

    def build(self) -> Grid1D:
        return Grid1D(self.x_min, self.x_max, self.n)


class PropagatorSection(Section):
    dt: confloat(gt=0.0) = Field(..., description="Time step")
    t_end: confloat(ge=0.0) = Field(..., description="Final time")
    scheme: Literal["split-step", "crank-nicolson"] = Field(default="split-step", description="Time stepper")
    record_stride: conint(ge=1) = Field(default=1, description="Record every this many steps")
    absorber: bool = Field(default=False, description="Enable the edge absorber")
    absorber_width: confloat(gt=0.0, lt=0.5) = Field(default=0.1, description="Absorber layer as domain fraction")
    absorber_strength: confloat(ge=0.0) = Field(default=5.0, description="Absorber sink strength s")
    workers: conint(ge=1) = Field(default=1, description="scipy.fft worker count")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def build(self) -> PropagatorConfig:
        absorber = Absorber(self.absorber_width, self.absorber_strength) if self.absorber else None
        return PropagatorConfig(dt=self.dt, n_steps=self.n_steps, scheme=self.scheme, absorber=absorber,
                                record_stride=self.record_stride, store_fields=True, workers=self.workers)


class NonlinearSection(Section):
    sigma_nl: float = Field(default=0.0, description="Strength of sigma_nl |Psi|^p")
    p: float = Field(default=2.0, description="Exponent p (non-zero)")

    @field_validator("p")
    def validate_p(cls, v):
        if v == 0:
            raise ValueError("nonlinear exponent p must be non-zero")
        return v

    def build(self) -> NonlinearTerm:
        return NonlinearTerm(self.sigma_nl, self.p)


class TruncationWindow(Section):
    kind: Literal["hard", "gaussian"] = Field(default="gaussian", description="Aperture shape")
    center: float = Field(default=0.0, description="Aperture centre in x at t = 0")
    width: confloat(gt=0.0) = Field(..., description="Half-width (hard) or standard width (gaussian)")

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "hard":
            return ((x >= self.center - self.width) & (x <= self.center + self.width)).astype(float)
        return np.exp(-(x - self.center) ** 2 / (2.0 * self.width ** 2))


class DiagnosticsSection(Section):
    track: Literal["peak", "centroid", "minimum", "source"] = Field(
        default="peak",
        description="Feature whose trajectory is fitted"
    )
    track_offset: float = Field(default=0.0, description="Comoving position q of the tracked feature")
    search_half_width: Optional[confloat(gt=0.0)] = Field(
        default=None,
        description="Search window half-width around x_c(t) + track_offset (whole grid when unset)"
    )
    fit_t_min: float = Field(default=0.0, description="Start of the fitted time interval")
    fit_t_max: Optional[float] = Field(default=None, description="End of the fitted time interval")
    interior_half_width: Optional[confloat(gt=0.0)] = Field(
        default=None,
        description="Half-width of the interior window around x_c(t) + track_offset"
    )
    flatness_target: float = Field(default=1.0, description="Target |Psi|^2 of the flatness measure")
    compare_analytic: bool = Field(default=True, description="Record errors against the exact solution")
    shape_time: Optional[float] = Field(default=None, description="Time at which shape invariance is scored")

    @model_validator(mode="after")
    def check_fit_interval(self):
        if self.fit_t_max is not None and self.fit_t_max <= self.fit_t_min:
            raise ValueError("fit_t_max must exceed fit_t_min")
        return self


class OutputSection(Section):
    dir: Optional[str] = Field(default=None, description="Output directory (defaults to <output_dir>/<name>)")
    density_map: bool = Field(default=True, description="Write density.pgm and its sidecar")
    field_stride: conint(ge=1) = Field(default=1, description="Write fields_t*.csv for every n-th record")


class SweepSection(Section):
    parameter: str = Field(..., description="Swept key as section.key, e.g. 'family.mu'")
    values: List[float] = Field(..., min_length=1, description="Values, one sub-run each")
    compare_final: bool = Field(default=False, description="Phase-aligned comparison of the final sub-run fields")

    @field_validator("values", mode="before")
    def listify(cls, v):
        return v if isinstance(v, list) else [v]

    @field_validator("parameter")
    def validate_parameter(cls, v):
        if v.count(".") != 1:
            raise ValueError("sweep parameter must look like section.key")
        return v


class SynthesizeSection(Section):
    table: str = Field(default="family", description="CSV table (q, psi[, v_real]) or 'family' to tabulate [family]")
    spacing: confloat(gt=0.0) = Field(default=1e-3, description="Tabulation spacing when table = family")
    domain_min: float = Field(default=-4.0, description="Left end of the synthesis domain")
    domain_max: float = Field(default=4.0, description="Right end of the synthesis domain")
    a: Optional[float] = Field(default=None, description="Acceleration (defaults to the family's)")
    mu: Optional[float] = Field(default=None, description="Frame constant (defaults to the family's)")
    right_sign: float = Field(default=1.0, description="Sign of G at the right end (+1 or -1)")
    check_min: confloat(ge=0.0) = Field(default=0.25, description="Smallest |q| included in the closed-form check")
    check_max: confloat(gt=0.0) = Field(default=2.0, description="Largest |q| included in the closed-form check")

    @model_validator(mode="after")
    def check_domain(self):
        if self.domain_max <= self.domain_min:
            raise ValueError("domain_max must exceed domain_min")
        if self.right_sign not in (-1.0, 1.0):
            raise ValueError("right_sign must be +1 or -1")
        return self


class AdjudicateSection(Section):
    claims: List[Literal["dark_soliton_mu", "c_shift"]] = Field(
        default_factory=lambda: list(CLAIMS),
        description="Claims to adjudicate"
    )
    steps: List[confloat(gt=0.0)] = Field(
        default_factory=lambda: [0.004, 0.002, 0.001],
        min_length=3,
        description="Refinement ladder (dx = dt_fd = h)"
    )
    workers: conint(ge=1) = Field(default=1, description="Candidates evaluated concurrently")

    @field_validator("claims", "steps", mode="before")
    def listify(cls, v):
        return v if isinstance(v, list) else [v]


SECTION_MODELS = {
    "scenario": ScenarioSection,
    "family": FamilySection,
    "grid": GridSection,
    "propagator": PropagatorSection,
    "nonlinear": NonlinearSection,
    "window": TruncationWindow,
    "diagnostics": DiagnosticsSection,
    "output": OutputSection,
    "sweep": SweepSection,
    "synthesize": SynthesizeSection,
    "adjudicate": AdjudicateSection,
}


class ScenarioSpec(Section):
    scenario: ScenarioSection
    family: Optional[FamilySection] = None
    grid: Optional[GridSection] = None
    propagator: Optional[PropagatorSection] = None
    nonlinear: Optional[NonlinearSection] = None
    window: Optional[TruncationWindow] = None
    diagnostics: DiagnosticsSection = Field(default_factory=DiagnosticsSection)
    output: OutputSection = Field(default_factory=OutputSection)
    sweep: Optional[SweepSection] = None
    synthesize: Optional[SynthesizeSection] = None
    adjudicate: Optional[AdjudicateSection] = None

    @model_validator(mode="after")
    def check_kind(self):
        kind = self.scenario.kind
        if kind == "propagate":
            missing = [name for name in ("family", "grid", "propagator") if getattr(self, name) is None]
            if missing:
                raise ValueError(f"a propagate scenario needs the section(s) {missing}")
        if kind == "synthesize":
            if self.synthesize is None:
                raise ValueError("a synthesize scenario needs a [synthesize] section")
            if self.synthesize.table == "family" and self.family is None:
                raise ValueError("table = family needs a [family] section")
        if self.sweep is not None:
            section, key = self.sweep.parameter.split(".")
            model = SECTION_MODELS.get(section)
            if model is None or key not in model.model_fields:
                raise ValueError(f"sweep parameter {self.sweep.parameter!r} does not name a known key")
        return self

    @property
    def name(self) -> str:
        return self.scenario.name

    @property
    def kind(self) -> str:
        return self.scenario.kind

    def build_family(self) -> SolutionFamily:
        if self.family is None:
            raise ValidationError("scenario has no [family] section", invariant="family present")
        return self.family.build()

    @staticmethod
    def revalidate(data: Dict[str, Any]) -> "ScenarioSpec":
        try:
            return ScenarioSpec.model_validate(data)
        except PydanticValidationError as exc:
            first = exc.errors()[0]
            where = ".".join(str(part) for part in first["loc"])
            raise ValidationError(f"{where}: {first['msg']}", invariant=first["msg"]) from None

    def with_value(self, dotted: str, value: Any) -> "ScenarioSpec":
        """Copy with section.key replaced (revalidated)"""
        section, key = dotted.split(".")
        data = self.model_dump(exclude_none=True)
        data.setdefault(section, {})[key] = value
        return self.revalidate(data)

    def without_sweep(self) -> "ScenarioSpec":
        data = self.model_dump(exclude_none=True)
        data.pop("sweep", None)
        return self.revalidate(data)

    def scaled(self, resolution_scale: float) -> "ScenarioSpec":
        """Refine the grid and the time step together by resolution_scale"""
        if resolution_scale == 1.0 or self.grid is None:
            return self
        if resolution_scale <= 0:
            raise ValidationError(f"resolution scale must be > 0, got {resolution_scale}",
                                  invariant="resolution_scale > 0")
        data = self.model_dump(exclude_none=True)
        data["grid"]["n"] = max(MIN_POINTS, int(round(self.grid.n * resolution_scale / 2.0)) * 2)
        if self.propagator is not None:
            data["propagator"]["dt"] = self.propagator.dt / resolution_scale
            data["propagator"]["record_stride"] = max(1, int(round(self.propagator.record_stride * resolution_scale)))
        return self.revalidate(data)

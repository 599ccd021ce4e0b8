"""Exact Fock-space simulation of heralded linear-optical quantum routers."""

from .analytics import SweepSpec, sweep
from .circuit import Branch, Circuit, DetectorConfig, HeraldRule, apply_element, measure_and_branch, run_heralded
from .circuitfmt import CircuitDoc, CircuitFormatError, build_circuit, load_bundled, parse_circuit, serialize
from .elements import OpticalElement, beam_splitter, hwp, ndf, pbs, pdbs, phase_shift, qwp
from .fock import Mode, ModeRegistry, RegistryError, StateVector, create_photon, inner_product, project_pattern, vacuum
from .gates import TunableGateParams, cphase_pi, cphase_tunable, p_c, ppg, qnd_herald
from .router import (
    ControlQubit,
    MultiResult,
    RouterResult,
    SignalQubit,
    output_fidelity,
    route_fixed,
    route_multi,
    route_tunable,
)

__version__ = "0.1.0"

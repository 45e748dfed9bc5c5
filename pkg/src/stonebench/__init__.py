"""Finite c-posets, their prime spectra, and spaces with base."""

from .duality import (
    EffectiveSpectralMap,
    check_effective_spectral,
    check_lds,
    counit_map,
    functor_P_mor,
    functor_P_obj,
    functor_T_mor,
    functor_T_obj,
    morphism_duality_check,
    unit_map,
)
from .encoding import EnumOperatorCode, enum_apply, pair, set_decode, set_encode, unpair
from .lattices import (
    FiniteAlgebra,
    check_semilattice_duality,
    cposet_from_semilattice,
    find_join_witness,
    find_meet_witness,
    join_ideal_closure,
)
from .order import (
    CPoset,
    FinitePoset,
    check_dp_isomorphism,
    check_strict,
    closure,
    enumerate_ideals,
    enumerate_primes,
    is_distributive,
    is_prime,
    lower_bounds,
    prime_separation,
    upper_bounds,
    validate_cposet,
)
from .presentations import injectivize_base, poset_to_cposet, presentation_report, relabel_cposet
from .spectrum import check_lphi, inc_from_operator, operator_from_inc, spectrum, v_of_set
from .topology import (
    SpaceWithBase,
    check_spectral,
    classify,
    inc_from_space,
    is_almost_sober,
    specialization_order,
    validate_space,
)

__version__ = "0.1.0"

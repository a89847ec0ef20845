"""Modulo sampling and recovery of bandpass signals."""
from .demodulation import (
    SampledSpectrum,
    SpectralSelector,
    am_remodulate,
    band_select,
    lowpass_extract,
    relocate,
    sinc_interpolate,
)
from .estimators import FourierPronyUnfolder, ModuloFolder, UnlimitedSamplingUnfolder
from .exceptions import (
    ConjugateSymmetryError,
    GridMismatchError,
    IllConditionedError,
    InfeasiblePlanError,
    InsufficientDataError,
    ModbandError,
    PartitionError,
    ResolutionError,
    UnavailableError,
    UnsupportedModeError,
)
from .folding import (
    FoldedCapture,
    HysteresisParams,
    IdealModuloParams,
    NonIdealResidue,
    capture_generalized,
    capture_ideal,
    fold_generalized,
    fold_ideal,
    fold_nonideal,
    jittered_residue,
    residue_and_fold_count,
)
from .harness import ExperimentConfig, SweepReport, load_preset, run_experiment
from .metrics import fix_offset, mse
from .planner import (
    DiscreteBandIndices,
    SamplingPlan,
    am_fourier_rate,
    am_time_rate,
    baseband_relocation,
    discrete_indices,
    fp_classic,
    lemma1_range,
    p_max,
    theorem1_range,
    theorem3_ranges,
    us_classic,
)
from .recovery_fourier import BinPartition, SpikeTrain, estimate_spikes, partition_bins, recover_bandpass_fourier
from .recovery_time import RecoveryReport, UsAlgConfig, recover_bandpass_time, recover_generalized, unfold_us
from .signal_model import (
    AmParams,
    BandSpec,
    FourierSeries,
    PeriodicBandpassSignal,
    evaluate,
    sup_norm,
    synth_am,
    synth_random_bandpass,
)

__version__ = "0.1.0"

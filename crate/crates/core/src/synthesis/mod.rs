//! Synthetic communication signals: two normal classes, seven jammed
//! mixtures and two novel FM probes.

mod class;
mod frame;
mod jammer;
mod mix;
mod normal;
mod novel;

pub use crate::series::measure_power;
pub use class::SignalClass;
pub use frame::{
    HostSpec, Interference, SignalSpec, SynthesisProfile, BPSK_SYMBOL_RATE, COMB_TEETH, DEFAULT_SAMPLE_RATE, FRAME_LEN,
    MULTI_TONE_COUNT, NOISE_FM_REFERENCE_KFM, NOISE_FM_REFERENCE_RATE, NOISE_FM_VARIANCE, PULSE_COUNT, PULSE_PERIOD,
    PULSE_WIDTH, SAMPLES_PER_HOP,
};
pub use jammer::{gen_jammer, noise_fm_phase, pulse_onsets, JammerSpec};
pub use mix::{jsr_scale, mix_at_jsr};
pub use normal::{bpsk_symbols, gen_bpsk, gen_fh, BpskSpec, FhSpec, HOPS};
pub use novel::{
    gen_novel, NovelFmKind, NovelFmSpec, PARABOLA_ORDINATE_RANGE, POWER_LAW_EXPONENT_RANGE, POWER_LAW_SPAN,
};

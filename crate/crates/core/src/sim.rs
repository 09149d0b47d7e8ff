//! Monte Carlo BER/FER sweeps over SNR and decoder variants.
//!
//! Every frame draws its noise from a substream keyed by `(seed, snr, frame)`
//! only, so all decoders at one SNR see the same noise and can be compared
//! frame by frame.

use std::io::Write;

use log::warn;
use thiserror::Error;

use crate::channel::{modulate, transmit, ChannelModel};
use crate::code::ParityCheckMatrix;
use crate::cycles::CycleCensus;
use crate::decoder::{DecodeError, Decoder, DecoderConfig};
use crate::encoder::SystematicEncoder;
use crate::rng::CounterRng;

pub const CSV_HEADER: [&str; 13] = [
    "decoder",
    "snr_db",
    "trials",
    "bit_errors",
    "frame_errors",
    "undetected_frames",
    "ber",
    "fer",
    "avg_iterations",
    "converged_fraction",
    "max_iter",
    "seed",
    "code_id",
];

pub const DEFAULT_MIN_FRAME_ERRORS: u64 = 100;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// When to stop simulating one (variant, SNR) point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// Exactly this many frames.
    Trials(u64),
    /// Stop after `min_errors` frame errors or `max_trials` frames,
    /// whichever comes first.
    FrameErrors { min_errors: u64, max_trials: u64 },
}

impl StopRule {
    fn max_trials(self) -> u64 {
        match self {
            StopRule::Trials(t) => t,
            StopRule::FrameErrors { max_trials, .. } => max_trials,
        }
    }

    fn done(self, trials: u64, frame_errors: u64) -> bool {
        match self {
            StopRule::Trials(t) => trials >= t,
            StopRule::FrameErrors { min_errors, max_trials } => frame_errors >= min_errors || trials >= max_trials,
        }
    }
}

/// What each frame carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transmission {
    AllZero,
    /// Uniform random messages through the systematic encoder.
    RandomMessages,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub seed: u64,
    pub stop_rule: StopRule,
    pub transmission: Transmission,
    pub code_id: String,
}

impl SweepConfig {
    pub fn new(seed: u64, stop_rule: StopRule) -> Self {
        Self { seed, stop_rule, transmission: Transmission::AllZero, code_id: String::new() }
    }
}

/// Tallies for one (variant, SNR) point.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    pub decoder: String,
    pub snr_db: f64,
    pub trials: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub undetected_frames: u64,
    pub ber: f64,
    pub fer: f64,
    pub avg_iterations: f64,
    pub converged_fraction: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub code_id: String,
}

/// Outcome of one decoded frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameOutcome {
    pub bit_errors: u32,
    pub iterations: u32,
    pub converged: bool,
}

impl FrameOutcome {
    pub fn frame_error(&self) -> bool {
        self.bit_errors > 0
    }

    /// Decoded to a valid but wrong codeword.
    pub fn undetected(&self) -> bool {
        self.converged && self.bit_errors > 0
    }
}

/// Noise stream of one frame. Independent of the decoder.
pub fn frame_stream(seed: u64, snr_db: f64, frame: u64) -> CounterRng {
    CounterRng::new(seed).substream_path(&[snr_db.to_bits(), frame])
}

/// Simulates a single frame.
pub fn simulate_frame(
    decoder: &Decoder,
    channel: &ChannelModel,
    seed: u64,
    frame: u64,
    encoder: Option<&SystematicEncoder>,
) -> Result<FrameOutcome, DecodeError> {
    let n = decoder.code().n();
    let root = frame_stream(seed, channel.snr_db, frame);
    let x = match encoder {
        Some(enc) => {
            let mut bits = root.substream(1);
            let msg: Vec<u8> = (0..enc.k()).map(|_| (bits.next_u64() >> 63) as u8).collect();
            enc.encode(&msg).expect("message length matches encoder")
        }
        None => vec![0u8; n],
    };
    let y = transmit(&modulate(&x), channel.sigma2, &mut root.substream(0));
    let r = decoder.decode(&y, channel.sigma2)?;
    let bit_errors = r.codeword.iter().zip(&x).filter(|(a, b)| a != b).count() as u32;
    Ok(FrameOutcome { bit_errors, iterations: r.iterations_used as u32, converged: r.converged })
}

/// Runs one (decoder, SNR) point and keeps every frame's outcome, in frame
/// order.
pub fn run_point(
    decoder: &Decoder,
    snr_db: f64,
    cfg: &SweepConfig,
    encoder: Option<&SystematicEncoder>,
) -> Result<(SimRecord, Vec<FrameOutcome>), SimError> {
    validate_stop(cfg.stop_rule)?;
    let h = decoder.code();
    let channel = ChannelModel::new(snr_db, h.design_rate());
    let mut outcomes = Vec::new();
    let mut frame_errors = 0;
    while !cfg.stop_rule.done(outcomes.len() as u64, frame_errors) {
        let o = simulate_frame(decoder, &channel, cfg.seed, outcomes.len() as u64, encoder)?;
        frame_errors += u64::from(o.frame_error());
        outcomes.push(o);
    }
    Ok((tally(decoder, snr_db, cfg, &outcomes), outcomes))
}

fn tally(decoder: &Decoder, snr_db: f64, cfg: &SweepConfig, outcomes: &[FrameOutcome]) -> SimRecord {
    let trials = outcomes.len() as u64;
    let n = decoder.code().n() as u64;
    let sum = |f: &dyn Fn(&FrameOutcome) -> u64| outcomes.iter().map(f).sum::<u64>();
    let bit_errors = sum(&|o| u64::from(o.bit_errors));
    let frame_errors = sum(&|o| u64::from(o.frame_error()));
    let undetected_frames = sum(&|o| u64::from(o.undetected()));
    let iterations = sum(&|o| u64::from(o.iterations));
    let converged = sum(&|o| u64::from(o.converged));
    let t = trials as f64;
    SimRecord {
        decoder: decoder.config().variant.name().to_string(),
        snr_db,
        trials,
        bit_errors,
        frame_errors,
        undetected_frames,
        ber: bit_errors as f64 / (t * n as f64),
        fer: frame_errors as f64 / t,
        avg_iterations: iterations as f64 / t,
        converged_fraction: converged as f64 / t,
        max_iter: decoder.config().max_iterations,
        seed: cfg.seed,
        code_id: cfg.code_id.clone(),
    }
}

fn validate_stop(rule: StopRule) -> Result<(), SimError> {
    match rule {
        StopRule::FrameErrors { min_errors: 0, .. } => {
            Err(SimError::InvalidConfig("minimum frame errors must be at least 1".into()))
        }
        _ if rule.max_trials() == 0 => Err(SimError::InvalidConfig("trials must be at least 1".into())),
        _ => Ok(()),
    }
}

/// Simulates every decoder configuration at every SNR. Records come back
/// ordered by variant (as given), then by ascending SNR.
pub fn run_sweep(
    h: &ParityCheckMatrix,
    census: &CycleCensus,
    variants: &[DecoderConfig],
    snrs_db: &[f64],
    cfg: &SweepConfig,
) -> Result<Vec<SimRecord>, SimError> {
    validate_stop(cfg.stop_rule)?;
    if variants.is_empty() || snrs_db.is_empty() {
        return Err(SimError::InvalidConfig("need at least one decoder and one snr".into()));
    }
    if let Some(s) = snrs_db.iter().find(|s| !s.is_finite()) {
        return Err(SimError::InvalidConfig(format!("snr {s} is not finite")));
    }
    let mut snrs = snrs_db.to_vec();
    snrs.sort_by(f64::total_cmp);
    snrs.dedup();

    let encoder = match cfg.transmission {
        Transmission::AllZero => None,
        Transmission::RandomMessages => match SystematicEncoder::new(h) {
            Ok(enc) => Some(enc),
            Err(e) => {
                warn!("{e}; simulating the all-zero codeword instead");
                None
            }
        },
    };
    let decoders =
        variants.iter().map(|v| Decoder::for_variant(h, census, v.clone())).collect::<Result<Vec<_>, _>>()?;
    let mut records = Vec::with_capacity(decoders.len() * snrs.len());
    for d in &decoders {
        for &snr in &snrs {
            let (rec, _) = run_point(d, snr, cfg, encoder.as_ref())?;
            log::info!(
                "{} at {} dB: {} frames, ber {:.3e}, avg iterations {:.2}",
                rec.decoder,
                snr,
                rec.trials,
                rec.ber,
                rec.avg_iterations
            );
            records.push(rec);
        }
    }
    Ok(records)
}

/// Formats `x` with 10 significant digits.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..10).contains(&exp) {
        let s = format!("{:.*}", (9 - exp).max(0) as usize, x);
        // rounding may carry into an extra digit, e.g. 9.9999999999 -> 10.000000000
        let digits = s.chars().filter(char::is_ascii_digit).skip_while(|&c| c == '0').count();
        if digits > 10 && s.contains('.') {
            return s[..s.len() - 1].trim_end_matches('.').to_string();
        }
        s
    } else {
        format!("{x:.9e}")
    }
}

/// Writes the header and one row per record.
pub fn write_csv<W: Write>(records: &[SimRecord], sink: W) -> Result<(), SimError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.decoder.clone(),
            format_real(r.snr_db),
            r.trials.to_string(),
            r.bit_errors.to_string(),
            r.frame_errors.to_string(),
            r.undetected_frames.to_string(),
            format_real(r.ber),
            format_real(r.fer),
            format_real(r.avg_iterations),
            format_real(r.converged_fraction),
            r.max_iter.to_string(),
            r.seed.to_string(),
            r.code_id.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{fixture_hamming_7_4, peg_construct, ConstructionSpec};
    use crate::cycles::census;
    use crate::decoder::{ReweightVector, Variant};

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(2.0), "2.000000000");
        assert_eq!(format_real(0.125), "0.1250000000");
        assert_eq!(format_real(12.5), "12.50000000");
        assert_eq!(format_real(1.5e-7), "1.500000000e-7");
        assert_eq!(format_real(9.99999999999), "10.00000000");
    }

    #[test]
    fn empty_csv_is_header_only() {
        let mut out = Vec::new();
        write_csv(&[], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn stop_rules() {
        assert!(StopRule::Trials(3).done(3, 0));
        assert!(!StopRule::Trials(3).done(2, 5));
        let r = StopRule::FrameErrors { min_errors: 2, max_trials: 10 };
        assert!(r.done(4, 2));
        assert!(r.done(10, 0));
        assert!(!r.done(9, 1));
        assert!(validate_stop(StopRule::Trials(0)).is_err());
    }

    #[test]
    fn noiseless_sweep() {
        let h = peg_construct(&ConstructionSpec::regular(96, 48, 3, 1)).unwrap();
        let c = census(&h, 16).unwrap();
        let variants: Vec<_> = Variant::ALL.iter().map(|&v| DecoderConfig::new(v)).collect();
        let recs = run_sweep(&h, &c, &variants, &[20.0], &SweepConfig::new(3, StopRule::Trials(20))).unwrap();
        assert_eq!(recs.len(), 3);
        for r in &recs {
            assert_eq!((r.ber, r.fer, r.avg_iterations, r.converged_fraction), (0.0, 0.0, 1.0, 1.0));
        }
    }

    #[test]
    fn unit_reweighting_matches_bp_record() {
        let h = fixture_hamming_7_4();
        let cfg = SweepConfig::new(9, StopRule::Trials(200));
        let bp = Decoder::new(&h, DecoderConfig::new(Variant::StandardBp), ReweightVector::ones(3)).unwrap();
        let vf = Decoder::new(&h, DecoderConfig::new(Variant::VfapBp), ReweightVector::ones(3)).unwrap();
        let (mut a, oa) = run_point(&bp, 1.0, &cfg, None).unwrap();
        let (b, ob) = run_point(&vf, 1.0, &cfg, None).unwrap();
        assert_eq!(oa, ob);
        a.decoder = b.decoder.clone();
        assert_eq!(a, b);
    }
}

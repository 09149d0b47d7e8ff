//! BPSK over additive white Gaussian noise.

use crate::rng::CounterRng;

/// Noise level for a given `E_b/N_0` and code rate, unit-energy symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub snr_db: f64,
    pub rate: f64,
    pub sigma2: f64,
}

impl ChannelModel {
    pub fn new(snr_db: f64, rate: f64) -> Self {
        assert!(rate > 0.0 && rate <= 1.0, "code rate must lie in (0, 1]");
        assert!(snr_db.is_finite(), "snr must be finite");
        Self { snr_db, rate, sigma2: 1.0 / (2.0 * rate * 10f64.powf(snr_db / 10.0)) }
    }
}

/// Bit 1 maps to `+1`, bit 0 to `-1`.
pub fn modulate(x: &[u8]) -> Vec<f64> {
    x.iter().map(|&b| if b & 1 == 1 { 1.0 } else { -1.0 }).collect()
}

/// Adds independent `N(0, sigma2)` noise drawn from `rng`.
pub fn transmit(s: &[f64], sigma2: f64, rng: &mut CounterRng) -> Vec<f64> {
    let sigma = sigma2.sqrt();
    s.iter().map(|&v| v + sigma * rng.next_normal()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::{hard_decision, init_llr};

    #[test]
    fn mapping() {
        assert_eq!(modulate(&[1, 0, 1]), vec![1.0, -1.0, 1.0]);
        assert_eq!(modulate(&[0; 3]), vec![-1.0; 3]);
    }

    #[test]
    fn round_trip() {
        let x = [1u8, 0, 0, 1, 1];
        let mut rng = CounterRng::new(5);
        let y = transmit(&modulate(&x), 1e-6, &mut rng);
        assert_eq!(hard_decision(&init_llr(&y, 1e-6, 50.0).unwrap()), x);
        assert_eq!(transmit(&modulate(&x), 0.0, &mut rng), modulate(&x));
    }

    #[test]
    fn sigma_from_snr() {
        let ch = ChannelModel::new(0.0, 0.5);
        assert!((ch.sigma2 - 1.0).abs() < 1e-12);
        let ch = ChannelModel::new(2.0, 0.5);
        assert!((ch.sigma2 - 10f64.powf(-0.2)).abs() < 1e-12);
    }
}

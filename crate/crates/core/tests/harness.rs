use vfap::channel::{modulate, transmit, ChannelModel};
use vfap::construction::{peg_construct, ConstructionSpec};
use vfap::cycles::census;
use vfap::decoder::{Decoder, DecoderConfig, Variant};
use vfap::rng::CounterRng;
use vfap::sim::{run_point, run_sweep, write_csv, StopRule, SweepConfig, Transmission, CSV_HEADER};

#[test]
fn gaussian_noise_moments() {
    let sigma2 = 0.7;
    let mut rng = CounterRng::new(2024);
    let draws = 1_000_000;
    let y = transmit(&vec![0.0; draws], sigma2, &mut rng);
    let mean = y.iter().sum::<f64>() / draws as f64;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
    assert!(mean.abs() < 4.0 * sigma2.sqrt() / 1e3, "mean {mean}");
    assert!((var / sigma2 - 1.0).abs() < 0.01, "variance {var}");
}

#[test]
fn uniform_draws_are_flat() {
    let mut rng = CounterRng::new(5);
    let mut bins = [0u64; 16];
    let draws = 1_000_000;
    for _ in 0..draws {
        bins[(rng.next_f64() * 16.0) as usize] += 1;
    }
    let expected = draws as f64 / 16.0;
    let chi2: f64 = bins.iter().map(|&b| (b as f64 - expected).powi(2) / expected).sum();
    // 15 degrees of freedom, 99.9% quantile
    assert!(chi2 < 37.7, "chi2 {chi2}");
}

#[test]
fn csv_round_trip() {
    let h = peg_construct(&ConstructionSpec::regular(96, 48, 3, 1)).unwrap();
    let c = census(&h, 16).unwrap();
    let variants: Vec<_> = Variant::ALL.iter().map(|&v| DecoderConfig::new(v).with_max_iterations(10)).collect();
    let mut cfg = SweepConfig::new(4, StopRule::Trials(300));
    cfg.code_id = "peg96".into();
    let recs = run_sweep(&h, &c, &variants, &[2.0, 1.0], &cfg).unwrap();
    let mut out = Vec::new();
    write_csv(&recs, &mut out).unwrap();

    let mut reader = csv::Reader::from_reader(out.as_slice());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    for (row, rec) in rows.iter().zip(&recs) {
        assert_eq!(&row[0], rec.decoder);
        assert_eq!(row[1].parse::<f64>().unwrap(), rec.snr_db);
        let trials: u64 = row[2].parse().unwrap();
        let bit_errors: u64 = row[3].parse().unwrap();
        assert_eq!((trials, bit_errors), (rec.trials, rec.bit_errors));
        let ber: f64 = row[6].parse().unwrap();
        assert!((ber - bit_errors as f64 / (trials as f64 * 96.0)).abs() <= 1e-9 * ber.max(1e-300));
        assert_eq!(&row[12], "peg96");
    }
    // variant order as given, snr ascending within each
    let order: Vec<(&str, &str)> = rows.iter().map(|r| (r.get(0).unwrap(), r.get(1).unwrap())).collect();
    assert_eq!(order[0], ("standard_bp", "1.000000000"));
    assert_eq!(order[1], ("standard_bp", "2.000000000"));
    assert_eq!(order[5], ("vfap_bp", "2.000000000"));
}

#[test]
fn sweeps_are_reproducible() {
    let h = peg_construct(&ConstructionSpec::regular(96, 48, 3, 2)).unwrap();
    let c = census(&h, 16).unwrap();
    let variants = [DecoderConfig::new(Variant::VfapBp).with_max_iterations(10)];
    let cfg = SweepConfig::new(11, StopRule::FrameErrors { min_errors: 20, max_trials: 2000 });
    let a = run_sweep(&h, &c, &variants, &[1.0, 2.0], &cfg).unwrap();
    let b = run_sweep(&h, &c, &variants, &[1.0, 2.0], &cfg).unwrap();
    assert_eq!(a, b);
    let other = run_sweep(&h, &c, &variants, &[1.0, 2.0], &SweepConfig { seed: 12, ..cfg }).unwrap();
    assert_ne!(a, other);
}

#[test]
fn ber_falls_with_snr() {
    let h = peg_construct(&ConstructionSpec::regular(96, 48, 3, 3)).unwrap();
    let c = census(&h, 16).unwrap();
    let variants = [DecoderConfig::new(Variant::StandardBp).with_max_iterations(20)];
    let recs = run_sweep(&h, &c, &variants, &[0.5, 1.5, 2.5], &SweepConfig::new(1, StopRule::Trials(10_000))).unwrap();
    for w in recs.windows(2) {
        let bits = (w[0].trials * 96) as f64;
        let sd = (w[0].ber * (1.0 - w[0].ber) / bits + w[1].ber * (1.0 - w[1].ber) / bits).sqrt();
        assert!(w[1].ber <= w[0].ber + 2.0 * sd, "{} -> {}", w[0].ber, w[1].ber);
    }
    for r in &recs {
        assert!(r.avg_iterations >= 1.0 && r.avg_iterations <= 20.0);
    }
}

#[test]
fn random_messages_match_all_zero_statistics() {
    let h = peg_construct(&ConstructionSpec::regular(96, 48, 3, 4)).unwrap();
    let c = census(&h, 16).unwrap();
    let d = Decoder::for_variant(&h, &c, DecoderConfig::new(Variant::StandardBp).with_max_iterations(20)).unwrap();
    let enc = vfap::encoder::SystematicEncoder::new(&h).unwrap();
    let zero_cfg = SweepConfig::new(21, StopRule::Trials(5000));
    let rand_cfg = SweepConfig { transmission: Transmission::RandomMessages, seed: 22, ..zero_cfg.clone() };
    let (z, _) = run_point(&d, 1.5, &zero_cfg, None).unwrap();
    let (r, _) = run_point(&d, 1.5, &rand_cfg, Some(&enc)).unwrap();
    let bits = 5000.0 * 96.0;
    let sd = (z.ber * (1.0 - z.ber) / bits + r.ber * (1.0 - r.ber) / bits).sqrt();
    // bit errors cluster within frames, so allow a wider band than independent bits would need
    assert!((z.ber - r.ber).abs() < 6.0 * sd, "{} vs {}", z.ber, r.ber);
    let fsd = (z.fer * (1.0 - z.fer) / 5000.0 + r.fer * (1.0 - r.fer) / 5000.0).sqrt();
    assert!((z.fer - r.fer).abs() < 3.0 * fsd, "{} vs {}", z.fer, r.fer);
}

#[test]
fn paired_noise_across_variants() {
    let h = peg_construct(&ConstructionSpec::regular(96, 48, 3, 5)).unwrap();
    let ch = ChannelModel::new(2.0, 0.5);
    let a = transmit(&modulate(&[0; 96]), ch.sigma2, &mut vfap::sim::frame_stream(7, 2.0, 3).substream(0));
    let b = transmit(&modulate(&[0; 96]), ch.sigma2, &mut vfap::sim::frame_stream(7, 2.0, 3).substream(0));
    assert_eq!(a, b);
    let c = census(&h, 16).unwrap();
    let cfg = SweepConfig::new(7, StopRule::Trials(50));
    let bp = Decoder::for_variant(&h, &c, DecoderConfig::new(Variant::StandardBp)).unwrap();
    let (_, frames) = run_point(&bp, 8.0, &cfg, None).unwrap();
    assert!(frames.iter().all(|f| f.converged && f.bit_errors == 0));
}

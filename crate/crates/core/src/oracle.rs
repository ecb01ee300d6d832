//! Deterministic physics surrogate that stands in for the proprietary
//! flight-test dataset.
//!
//! The surrogate replaces the CFD/FEM + flight-history chain with closed
//! forms that keep its qualitative structure: ground stress quadratic in
//! fuel weight, flight stress driven by mass, flaps and dynamic pressure
//! (lift ~ TAS^2 through the air density), exponential exceedance spectra
//! for gust/maneuver/turn cycles, a once-per-flight ground-air-ground cycle
//! whose amplitude grows log-extreme with flight time, and a Basquin S-N
//! law with Goodman mean-stress correction under Miner accumulation. The
//! ground-air-ground cycle dominates the damage for most samples.
//!
//! Everything is generated from the configured seed alone; two worlds built
//! with the same config are identical.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{
    check_pse, FlightParams, Mission, Phase, SampleKey, Segment, SegmentClass, StressVector,
};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Reference mass for load normalization, kg.
pub const W_REF: f64 = 20_000.0;

/// Reference dynamic pressure for the turn gain, Pa.
pub const Q_REF: f64 = 10_000.0;

/// Single wing alloy of the study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Material {
    /// Ultimate tensile strength, MPa.
    pub sigma_ultimate: f64,
    /// Basquin coefficient C in N_f = C / (kt * sigma_ar)^b, MPa^b * cycles.
    pub basquin_c: f64,
    /// Basquin exponent b.
    pub basquin_b: f64,
}

impl Default for Material {
    fn default() -> Self {
        Material {
            sigma_ultimate: 500.0,
            basquin_c: 1e17,
            basquin_b: 4.0,
        }
    }
}

/// Configuration of the synthetic world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    pub n_pse: u8,
    pub n_missions: usize,
    /// Stress concentration factors each sample is evaluated at.
    pub kt_set: Vec<f64>,
    pub material: Material,
    /// Gust arrival rate, 1/s.
    pub gust_rate: f64,
    /// Maneuver arrival rate, 1/s.
    pub maneuver_rate: f64,
    /// Turn arrival rate, 1/s.
    pub turn_rate: f64,
    /// Exceedance amplitude scale as a fraction of the incremental stress.
    pub exceedance_scale: f64,
    /// Weight of the dynamic contribution to the ground-air-ground peak.
    pub gag_mix: f64,
    /// Amplitude bins per cycle source (spectrum truncated at 6 scale units).
    pub gm_bins: usize,
    /// Valley depth of gust/maneuver cycles relative to their peak rise.
    pub valley_ratio: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n_pse: 38,
            n_missions: 7,
            kt_set: vec![1.5, 2.0, 2.5, 3.0],
            material: Material::default(),
            gust_rate: 0.02,
            maneuver_rate: 0.005,
            turn_rate: 0.002,
            exceedance_scale: 0.35,
            gag_mix: 0.8,
            gm_bins: 8,
            valley_ratio: 0.6,
            seed: 42,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_pse == 0 || self.n_pse > crate::domain::N_PSE {
            return Err(Error::invalid(format!(
                "n_pse must be in 1..={}, got {}",
                crate::domain::N_PSE,
                self.n_pse
            )));
        }
        if self.n_missions < 3 {
            return Err(Error::invalid("need at least 3 missions"));
        }
        if self.kt_set.is_empty() || self.kt_set.iter().any(|&k| k <= 1.0) {
            return Err(Error::invalid("kt values must be > 1"));
        }
        if self.gust_rate <= 0.0 || self.maneuver_rate <= 0.0 || self.turn_rate <= 0.0 {
            return Err(Error::invalid("cycle rates must be > 0"));
        }
        if self.material.basquin_b <= 0.0 || self.material.basquin_c <= 0.0 {
            return Err(Error::invalid("Basquin parameters must be > 0"));
        }
        if !(self.exceedance_scale > 0.0 && self.exceedance_scale <= 1.0) {
            return Err(Error::invalid("exceedance_scale must be in (0, 1]"));
        }
        if !(self.gag_mix > 0.0 && self.gag_mix <= 1.0) {
            return Err(Error::invalid("gag_mix must be in (0, 1]"));
        }
        if self.gm_bins == 0 {
            return Err(Error::invalid("gm_bins must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.valley_ratio) {
            return Err(Error::invalid("valley_ratio must be in [0, 1)"));
        }
        Ok(())
    }
}

/// Stress transfer coefficients of one PSE, the surrogate for its FEM
/// transfer functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseCoeffs {
    /// Ground equilibrium stress: one_g = a + b*fw + c*fw^2.
    pub ground_a: f64,
    pub ground_b: f64,
    pub ground_c: f64,
    /// Flight load gain (MPa per normalized load unit), > 0.
    pub load_gain: f64,
    /// Fuel relief, MPa per kg.
    pub fuel_relief: f64,
    /// Constant flight offset, MPa.
    pub offset: f64,
    /// Gust response gain.
    pub gust_gain: f64,
    /// Turn response gain.
    pub turn_gain: f64,
}

/// One load cycle: peak, valley and how often it occurs. Occurrence counts
/// are expected values and may be fractional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleTriplet {
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub occurrences: f64,
}

/// Everything the oracle knows about one {mission, PSE, kt} sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthRecord {
    pub key: SampleKey,
    /// True stress vector per mission segment, in segment order.
    pub stresses: Vec<StressVector>,
    /// Gust/maneuver cycles over all flight segments, occurrences already
    /// accumulated over the mission's n flights.
    pub gm_cycles: Vec<CycleTriplet>,
    /// The once-per-flight ground-air-ground cycle (occurrences = n).
    pub gag_cycle: CycleTriplet,
    /// Damage from the ground-air-ground cycle over n flights.
    pub d_gag: f64,
    /// Damage from gust/maneuver cycles over n flights.
    pub d_gm: f64,
    /// Fatigue life in flights: n / (d_gag + d_gm).
    pub life_n: f64,
}

/// The generated fleet: per-PSE coefficients plus mission flight plans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleWorld {
    pub config: OracleConfig,
    pub coeffs: Vec<PseCoeffs>,
    pub missions: Vec<Mission>,
}

/// Exponential atmosphere: rho = 1.225 * exp(-h / 8500).
pub fn air_density(altitude_m: f64) -> Result<f64> {
    if altitude_m < 0.0 {
        return Err(Error::invalid(format!("altitude must be >= 0, got {altitude_m}")));
    }
    Ok(1.225 * (-altitude_m / 8500.0).exp())
}

fn mission_id(index: usize) -> String {
    // A, B, ..., Z, AA, AB, ... for the unlikely case of > 26 missions
    let mut index = index;
    let mut id = String::new();
    loop {
        id.insert(0, (b'A' + (index % 26) as u8) as char);
        index /= 26;
        if index == 0 {
            break;
        }
        index -= 1;
    }
    id
}

fn generate_pse_coeffs(seed: u64, pse: u8) -> PseCoeffs {
    let mut rng = stream_rng(seed, 1_000 + pse as u64);
    PseCoeffs {
        ground_a: rng.random_range(4.0..20.0),
        ground_b: rng.random_range(5e-4..1.5e-3),
        ground_c: rng.random_range(2e-8..8e-8),
        load_gain: rng.random_range(60.0..300.0),
        fuel_relief: rng.random_range(2e-4..9e-4),
        offset: rng.random_range(0.0..12.0),
        gust_gain: rng.random_range(0.08..0.22),
        turn_gain: rng.random_range(3.0..10.0),
    }
}

/// Per-class parameter ranges. The first mission's cruise altitude and
/// payload are pushed to the edge of (and slightly beyond) the range the
/// other missions sample, so its feature distributions sit in a poorly
/// populated corner of the input space.
fn generate_mission(config: &OracleConfig, index: usize) -> Mission {
    let mut rng = stream_rng(config.seed, 2_000 + index as u64);
    let shifted = index == 0;

    let n_flights = rng.random_range(800..=13_000u32);
    let oew = 13_500.0;
    let pl = if shifted {
        rng.random_range(3_200.0..4_200.0)
    } else {
        rng.random_range(800.0..3_500.0)
    };
    let zfw = oew + pl;
    let fuel_initial = rng.random_range(3_500.0..7_500.0);
    let fuel_final = rng.random_range(600.0..1_200.0);
    let cruise_alt = if shifted {
        rng.random_range(9_200.0..11_000.0)
    } else {
        rng.random_range(6_000.0..9_500.0)
    };

    let n_flight_segments = rng.random_range(4..=8usize);
    let mut classes = vec![SegmentClass::Taxi, SegmentClass::Climb];
    for _ in 0..n_flight_segments - 3 {
        classes.push(SegmentClass::Cruise);
    }
    classes.push(SegmentClass::Descent);
    classes.push(SegmentClass::Approach);

    let n_segments = classes.len();
    let mut segments = Vec::with_capacity(n_segments);
    for (i, class) in classes.into_iter().enumerate() {
        // linear fuel burn across the mission
        let frac = i as f64 / (n_segments - 1) as f64;
        let fw = fuel_initial + (fuel_final - fuel_initial) * frac;
        let (flaps, tas, altitude, time, thrust): (f64, f64, f64, f64, f64) = match class {
            SegmentClass::Taxi => (
                0.0,
                rng.random_range(5.0..15.0),
                0.0,
                rng.random_range(600.0..1_800.0),
                rng.random_range(8e3..20e3),
            ),
            SegmentClass::Climb => (
                rng.random_range(5.0..15.0),
                rng.random_range(120.0..180.0),
                cruise_alt * rng.random_range(0.4..0.6),
                rng.random_range(600.0..1_500.0),
                rng.random_range(60e3..90e3),
            ),
            SegmentClass::Cruise => (
                0.0,
                rng.random_range(180.0..250.0),
                cruise_alt * rng.random_range(0.96..1.04),
                rng.random_range(1_800.0..7_200.0),
                rng.random_range(30e3..50e3),
            ),
            SegmentClass::Descent => (
                0.0,
                rng.random_range(150.0..220.0),
                cruise_alt * rng.random_range(0.4..0.6),
                rng.random_range(600.0..1_500.0),
                rng.random_range(5e3..15e3),
            ),
            SegmentClass::Approach => (
                rng.random_range(20.0..40.0),
                rng.random_range(70.0..110.0),
                rng.random_range(300.0..800.0),
                rng.random_range(300.0..900.0),
                rng.random_range(15e3..30e3),
            ),
        };
        let pressure = 101_325.0 * (1.0 - (-altitude / 8_500.0).exp());
        let params = FlightParams {
            flaps,
            tas,
            altitude,
            time,
            distance: tas * time,
            thrust,
            pressure,
            mass: zfw + fw,
            cma_pct: rng.random_range(20.0..35.0),
            zfw,
            pl,
            fw,
        };
        segments.push(Segment { class, params });
    }

    Mission {
        id: mission_id(index),
        segments,
        n_flights,
    }
}

/// Build the whole synthetic fleet deterministically from the config seed.
pub fn generate_fleet(config: &OracleConfig) -> Result<OracleWorld> {
    config.validate()?;
    let coeffs = (1..=config.n_pse)
        .map(|pse| generate_pse_coeffs(config.seed, pse))
        .collect();
    let missions: Vec<Mission> = (0..config.n_missions)
        .map(|i| generate_mission(config, i))
        .collect();
    for m in &missions {
        m.validate()?;
    }
    Ok(OracleWorld {
        config: config.clone(),
        coeffs,
        missions,
    })
}

/// True stress response of one PSE to one segment.
///
/// Ground: one_g quadratic in fuel weight, zero increments. Flight: mass-
/// and flap-driven equilibrium stress with fuel relief, maneuver increment
/// proportional to the normalized mass, gust increment through rho * TAS
/// (gust velocity response), turn increment growing with dynamic pressure.
pub fn oracle_stress(coeffs: &PseCoeffs, params: &FlightParams, phase: Phase) -> Result<StressVector> {
    match phase {
        Phase::Ground => {
            let fw = params.fw;
            Ok(StressVector {
                one_g: coeffs.ground_a + coeffs.ground_b * fw + coeffs.ground_c * fw * fw,
                d_vman: 0.0,
                d_vgust: 0.0,
                d_turn: 0.0,
            })
        }
        Phase::Flight => {
            let rho = air_density(params.altitude)?;
            let q = 0.5 * rho * params.tas * params.tas;
            let mass_ratio = params.mass / W_REF;
            let one_g = coeffs.load_gain * mass_ratio * (1.0 + 0.002 * params.flaps)
                - coeffs.fuel_relief * params.fw
                + coeffs.offset;
            Ok(StressVector {
                one_g,
                d_vman: 0.5 * coeffs.load_gain * mass_ratio,
                d_vgust: coeffs.gust_gain * rho * params.tas * (W_REF / params.mass),
                d_turn: coeffs.turn_gain * mass_ratio * (1.0 + q / Q_REF),
            })
        }
    }
}

/// Expected gust/maneuver/turn cycles of one flight segment, per flight.
///
/// Each source k with rate lambda_k and amplitude scale sigma_k =
/// exceedance_scale * d_k follows the exceedance law
/// n(x) = lambda_k * t * exp(-x / sigma_k), discretized into `bins` bins up
/// to 6 sigma_k; each bin contributes the count difference of its edges at
/// the amplitude of its center. Counts are expected values, no sampling.
pub fn gm_cycles(
    config: &OracleConfig,
    stress: &StressVector,
    t_seg: f64,
    bins: usize,
) -> Result<Vec<CycleTriplet>> {
    if t_seg <= 0.0 {
        return Err(Error::invalid(format!("t_seg must be > 0, got {t_seg}")));
    }
    if bins == 0 {
        return Err(Error::invalid("bins must be >= 1"));
    }
    let sources = [
        (config.gust_rate, stress.d_vgust),
        (config.maneuver_rate, stress.d_vman),
        (config.turn_rate, stress.d_turn),
    ];
    let mut cycles = Vec::with_capacity(3 * bins);
    let step = 6.0 / bins as f64;
    for (rate, d) in sources {
        let sigma = config.exceedance_scale * d;
        if sigma <= 0.0 {
            continue;
        }
        let total = rate * t_seg;
        for i in 1..=bins {
            let amplitude = sigma * (i as f64 - 0.5) * step;
            let occurrences =
                total * ((-((i - 1) as f64) * step).exp() - (-(i as f64) * step).exp());
            cycles.push(CycleTriplet {
                sigma_max: stress.one_g + amplitude,
                sigma_min: stress.one_g - config.valley_ratio * amplitude,
                occurrences,
            });
        }
    }
    Ok(cycles)
}

/// The once-per-flight ground-air-ground cycle.
///
/// Peak: the maximum over flight segments of one_g plus a log-extreme
/// dynamic term gag_mix * sigma_dom * ln(1 + lambda_tot * t_flight), where
/// sigma_dom is the exceedance scale of the segment's strongest source.
/// Valley: the minimum ground one_g. Occurs once per flight.
pub fn gag_cycle(
    config: &OracleConfig,
    segment_stresses: &[(Phase, StressVector)],
    t_flight: f64,
    n_flights: u32,
) -> Result<CycleTriplet> {
    if t_flight <= 0.0 {
        return Err(Error::invalid(format!("t_flight must be > 0, got {t_flight}")));
    }
    let lambda_tot = config.gust_rate + config.maneuver_rate + config.turn_rate;
    let growth = (1.0 + lambda_tot * t_flight).ln();

    let mut sigma_max = f64::NEG_INFINITY;
    let mut sigma_min = f64::INFINITY;
    for (phase, s) in segment_stresses {
        match phase {
            Phase::Flight => {
                let dom = s.d_vgust.max(s.d_vman).max(s.d_turn);
                let candidate = s.one_g + config.gag_mix * config.exceedance_scale * dom * growth;
                sigma_max = sigma_max.max(candidate);
            }
            Phase::Ground => {
                sigma_min = sigma_min.min(s.one_g);
            }
        }
    }
    if !sigma_max.is_finite() {
        return Err(Error::invalid("mission has no flight segments"));
    }
    if !sigma_min.is_finite() {
        return Err(Error::invalid("mission has no ground segments"));
    }
    Ok(CycleTriplet {
        sigma_max,
        sigma_min,
        occurrences: n_flights as f64,
    })
}

/// Basquin S-N law with Goodman mean-stress correction.
///
/// sigma_ar = sigma_a / (1 - max(0, sigma_m) / sigma_u), and
/// N_f = C / (kt * sigma_ar)^b; returns +inf when the corrected amplitude
/// vanishes (no alternation, no fatigue).
pub fn cycles_to_failure(
    sigma_max: f64,
    sigma_min: f64,
    kt: f64,
    material: &Material,
) -> Result<f64> {
    if sigma_max <= sigma_min {
        return Err(Error::invalid(format!(
            "sigma_max ({sigma_max}) must exceed sigma_min ({sigma_min})"
        )));
    }
    let sigma_a = 0.5 * (sigma_max - sigma_min);
    let sigma_m = 0.5 * (sigma_max + sigma_min);
    if sigma_m >= material.sigma_ultimate {
        return Err(Error::numeric(format!(
            "mean stress {sigma_m} reaches the static failure regime (sigma_u = {})",
            material.sigma_ultimate
        )));
    }
    let sigma_ar = sigma_a / (1.0 - sigma_m.max(0.0) / material.sigma_ultimate);
    if sigma_ar <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(material.basquin_c / (kt * sigma_ar).powf(material.basquin_b))
}

/// Miner accumulation: D = sum occurrences_i / N_f(cycle_i).
pub fn miner_damage(cycles: &[CycleTriplet], kt: f64, material: &Material) -> Result<f64> {
    let mut damage = 0.0;
    for c in cycles {
        let n_f = cycles_to_failure(c.sigma_max, c.sigma_min, kt, material)?;
        damage += c.occurrences / n_f;
    }
    Ok(damage)
}

impl OracleWorld {
    pub fn mission(&self, id: &str) -> Result<&Mission> {
        self.missions
            .iter()
            .find(|m| m.id == id)
            .ok_or_else(|| Error::invalid(format!("unknown mission '{id}'")))
    }

    pub fn coeffs_for(&self, pse: u8) -> Result<&PseCoeffs> {
        check_pse(pse)?;
        self.coeffs
            .get(pse as usize - 1)
            .ok_or_else(|| Error::invalid(format!("PSE {pse} not in this world")))
    }

    /// All {mission, PSE, kt} keys in deterministic (mission, pse, kt) order.
    pub fn sample_keys(&self) -> Vec<SampleKey> {
        let mut keys = Vec::new();
        for mission in &self.missions {
            for pse in 1..=self.config.n_pse {
                for &kt in &self.config.kt_set {
                    keys.push(SampleKey {
                        mission_id: mission.id.clone(),
                        pse,
                        kt,
                    });
                }
            }
        }
        keys
    }

    /// True stresses of every segment of `mission` at `pse`.
    pub fn segment_stresses(&self, mission: &Mission, pse: u8) -> Result<Vec<StressVector>> {
        let coeffs = self.coeffs_for(pse)?;
        mission
            .segments
            .iter()
            .map(|seg| oracle_stress(coeffs, &seg.params, seg.phase()))
            .collect()
    }
}

/// Compute the full ground-truth record for one sample key.
pub fn label_sample(world: &OracleWorld, key: &SampleKey) -> Result<GroundTruthRecord> {
    let mission = world.mission(&key.mission_id)?;
    if !world.config.kt_set.contains(&key.kt) {
        return Err(Error::invalid(format!("kt {} not in the configured set", key.kt)));
    }
    let stresses = world.segment_stresses(mission, key.pse)?;
    let n = mission.n_flights;
    let config = &world.config;

    // gust/maneuver cycles: per-flight expected counts, scaled to n flights
    let mut gm = Vec::new();
    for (seg, s) in mission.segments.iter().zip(&stresses) {
        if seg.phase() == Phase::Flight {
            for mut cycle in gm_cycles(config, s, seg.params.time, config.gm_bins)? {
                cycle.occurrences *= n as f64;
                gm.push(cycle);
            }
        }
    }

    let phased: Vec<(Phase, StressVector)> = mission
        .segments
        .iter()
        .zip(&stresses)
        .map(|(seg, s)| (seg.phase(), *s))
        .collect();
    let gag = gag_cycle(config, &phased, mission.t_flight(), n)?;

    let d_gag = miner_damage(&[gag], key.kt, &config.material)?;
    let d_gm = miner_damage(&gm, key.kt, &config.material)?;
    let total = d_gag + d_gm;
    if !(total > 0.0) {
        return Err(Error::numeric(format!(
            "total damage is not positive for {key:?}"
        )));
    }
    Ok(GroundTruthRecord {
        key: key.clone(),
        stresses,
        gm_cycles: gm,
        gag_cycle: gag,
        d_gag,
        d_gm,
        life_n: n as f64 / total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn air_density_profile() {
        assert_eq!(air_density(0.0).unwrap(), 1.225);
        let one_scale_height = air_density(8500.0).unwrap();
        assert!((one_scale_height - 1.225 / std::f64::consts::E).abs() < 1e-12);
        assert!((one_scale_height - 0.45065).abs() < 1e-4);
        assert!(air_density(-1.0).is_err());
        let mut prev = air_density(0.0).unwrap();
        for h in [100.0, 1_000.0, 5_000.0, 11_000.0] {
            let rho = air_density(h).unwrap();
            assert!(rho < prev);
            prev = rho;
        }
    }

    #[test]
    fn fleet_is_deterministic() {
        let config = OracleConfig::default();
        let a = generate_fleet(&config).unwrap();
        let b = generate_fleet(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn default_world_has_1064_sample_keys() {
        let world = generate_fleet(&OracleConfig::default()).unwrap();
        assert_eq!(world.coeffs.len(), 38);
        assert_eq!(world.missions.len(), 7);
        // 38 PSEs x 7 missions x 4 kt values
        assert_eq!(world.sample_keys().len(), 1064);
    }

    #[test]
    fn every_mission_has_exactly_one_taxi_segment() {
        let world = generate_fleet(&OracleConfig::default()).unwrap();
        for m in &world.missions {
            let taxis = m
                .segments
                .iter()
                .filter(|s| s.class == SegmentClass::Taxi)
                .count();
            assert_eq!(taxis, 1, "mission {}", m.id);
            assert!(m.flight_segments().count() >= 4);
            assert!(m.flight_segments().count() <= 8);
            assert!((800..=13_000).contains(&m.n_flights));
        }
    }

    #[test]
    fn ground_stress_is_quadratic_with_zero_increments() {
        let coeffs = PseCoeffs {
            ground_a: 7.0,
            ground_b: 0.001,
            ground_c: 1e-8,
            load_gain: 100.0,
            fuel_relief: 5e-4,
            offset: 5.0,
            gust_gain: 0.1,
            turn_gain: 5.0,
        };
        let mut params = FlightParams::from_array([0.0; 12]);
        params.time = 100.0;
        params.fw = 0.0;
        let s = oracle_stress(&coeffs, &params, Phase::Ground).unwrap();
        assert_eq!(s.one_g, 7.0);
        assert_eq!((s.d_vman, s.d_vgust, s.d_turn), (0.0, 0.0, 0.0));

        params.fw = 2_000.0;
        let s = oracle_stress(&coeffs, &params, Phase::Ground).unwrap();
        assert!((s.one_g - (7.0 + 2.0 + 0.04)).abs() < 1e-12);
    }

    #[test]
    fn flight_unit_load_case() {
        let coeffs = PseCoeffs {
            ground_a: 0.0,
            ground_b: 0.0,
            ground_c: 0.0,
            load_gain: 80.0,
            fuel_relief: 1e-3,
            offset: 3.0,
            gust_gain: 0.1,
            turn_gain: 5.0,
        };
        let mut params = FlightParams::from_array([0.0; 12]);
        params.time = 100.0;
        params.mass = W_REF;
        params.tas = 200.0;
        params.altitude = 8_000.0;
        params.flaps = 0.0;
        params.fw = 0.0;
        let s = oracle_stress(&coeffs, &params, Phase::Flight).unwrap();
        // mass = W_ref, flaps = 0, fw = 0 -> one_g = load_gain + offset
        assert!((s.one_g - 83.0).abs() < 1e-12);
        assert!((s.d_vman - 40.0).abs() < 1e-12);
        assert!(s.d_vgust > 0.0 && s.d_turn > 0.0);
    }

    #[test]
    fn gm_cycle_counts_telescope() {
        let config = OracleConfig::default();
        let stress = StressVector {
            one_g: 100.0,
            d_vman: 40.0,
            d_vgust: 25.0,
            d_turn: 12.0,
        };
        let t_seg = 3_000.0;
        let cycles = gm_cycles(&config, &stress, t_seg, 8).unwrap();
        assert_eq!(cycles.len(), 24);
        // per source, total expected count telescopes to lambda*t*(1 - e^-6)
        let expected_fraction = 1.0 - (-6.0f64).exp();
        for (rate, chunk) in [
            (config.gust_rate, &cycles[0..8]),
            (config.maneuver_rate, &cycles[8..16]),
            (config.turn_rate, &cycles[16..24]),
        ] {
            let total: f64 = chunk.iter().map(|c| c.occurrences).sum();
            assert!((total - rate * t_seg * expected_fraction).abs() < 1e-9);
        }
        for c in &cycles {
            assert!(c.sigma_max > stress.one_g);
            assert!(c.sigma_min < stress.one_g);
            assert!(c.occurrences > 0.0);
        }
        // doubling exposure time doubles every count
        let doubled = gm_cycles(&config, &stress, 2.0 * t_seg, 8).unwrap();
        for (a, b) in cycles.iter().zip(&doubled) {
            assert!((b.occurrences - 2.0 * a.occurrences).abs() < 1e-12);
            assert_eq!(a.sigma_max, b.sigma_max);
        }
    }

    #[test]
    fn gag_cycle_formula() {
        let mut config = OracleConfig::default();
        let stresses = vec![
            (
                Phase::Ground,
                StressVector { one_g: 12.0, d_vman: 0.0, d_vgust: 0.0, d_turn: 0.0 },
            ),
            (
                Phase::Flight,
                StressVector { one_g: 50.0, d_vman: 30.0, d_vgust: 10.0, d_turn: 5.0 },
            ),
            (
                Phase::Flight,
                StressVector { one_g: 45.0, d_vman: 20.0, d_vgust: 8.0, d_turn: 4.0 },
            ),
        ];
        let t_flight = 5_000.0;
        let cycle = gag_cycle(&config, &stresses, t_flight, 900).unwrap();
        let lambda_tot = config.gust_rate + config.maneuver_rate + config.turn_rate;
        let expected = 50.0 + 0.8 * 0.35 * 30.0 * (1.0 + lambda_tot * t_flight).ln();
        assert!((cycle.sigma_max - expected).abs() < 1e-12);
        assert_eq!(cycle.sigma_min, 12.0);
        assert_eq!(cycle.occurrences, 900.0);

        // with gag_mix -> 0 the peak is just the highest flight one_g
        config.gag_mix = 1e-300;
        let cycle = gag_cycle(&config, &stresses, t_flight, 900).unwrap();
        assert!((cycle.sigma_max - 50.0).abs() < 1e-9);

        // both phases are required
        let flight_only = &stresses[1..];
        assert!(gag_cycle(&config, flight_only, t_flight, 900).is_err());
    }

    #[test]
    fn sn_curve_hand_value() {
        let material = Material::default();
        // sigma_a = 100, sigma_m = 100, Goodman -> 125, kt 2 -> 250^4
        let n_f = cycles_to_failure(200.0, 0.0, 2.0, &material).unwrap();
        assert!((n_f - 2.56e7).abs() / 2.56e7 < 1e-12);

        // doubling kt with b = 4 divides life by 16
        let n_f_kt4 = cycles_to_failure(200.0, 0.0, 4.0, &material).unwrap();
        assert!((n_f / n_f_kt4 - 16.0).abs() < 1e-9);

        // static failure regime
        assert!(cycles_to_failure(1_000.0, 980.0, 2.0, &material).is_err());
        // degenerate cycle
        assert!(cycles_to_failure(100.0, 100.0, 2.0, &material).is_err());
    }

    #[test]
    fn miner_damage_is_linear() {
        let material = Material::default();
        let n_f = cycles_to_failure(200.0, 0.0, 2.0, &material).unwrap();
        let cycle = CycleTriplet {
            sigma_max: 200.0,
            sigma_min: 0.0,
            occurrences: n_f,
        };
        // occurrences = N_f means damage exactly 1
        let d = miner_damage(&[cycle], 2.0, &material).unwrap();
        assert!((d - 1.0).abs() < 1e-12);

        assert_eq!(miner_damage(&[], 2.0, &material).unwrap(), 0.0);

        let a = CycleTriplet { sigma_max: 150.0, sigma_min: 10.0, occurrences: 500.0 };
        let b = CycleTriplet { sigma_max: 180.0, sigma_min: -5.0, occurrences: 200.0 };
        let d_union = miner_damage(&[a, b], 2.0, &material).unwrap();
        let d_a = miner_damage(&[a], 2.0, &material).unwrap();
        let d_b = miner_damage(&[b], 2.0, &material).unwrap();
        assert!((d_union - (d_a + d_b)).abs() < 1e-15 * d_union.abs().max(1.0));
    }

    #[test]
    fn label_sample_life_identity_and_monotonicity() {
        let world = generate_fleet(&OracleConfig::default()).unwrap();
        let key = SampleKey { mission_id: "A".into(), pse: 1, kt: 2.0 };
        let rec = label_sample(&world, &key).unwrap();
        let n = world.mission("A").unwrap().n_flights as f64;
        assert!((rec.life_n * (rec.d_gag + rec.d_gm) - n).abs() / n < 1e-9);
        assert!(rec.d_gag > 0.0 && rec.d_gm > 0.0);

        // larger kt, same everything else -> shorter life
        let rec_kt3 = label_sample(
            &world,
            &SampleKey { mission_id: "A".into(), pse: 1, kt: 3.0 },
        )
        .unwrap();
        assert!(rec_kt3.life_n < rec.life_n);

        // unknown keys fail
        assert!(
            label_sample(&world, &SampleKey { mission_id: "Z".into(), pse: 1, kt: 2.0 }).is_err()
        );
        assert!(
            label_sample(&world, &SampleKey { mission_id: "A".into(), pse: 0, kt: 2.0 }).is_err()
        );
        assert!(
            label_sample(&world, &SampleKey { mission_id: "A".into(), pse: 1, kt: 2.25 }).is_err()
        );
    }

    #[test]
    fn damage_monotone_in_flight_time_and_n() {
        let config = OracleConfig::default();
        let world = generate_fleet(&config).unwrap();
        let key = SampleKey { mission_id: "B".into(), pse: 5, kt: 2.5 };
        let base = label_sample(&world, &key).unwrap();

        // stretch every flight segment by 1.5x
        let mut stretched = world.clone();
        let idx = stretched.missions.iter().position(|m| m.id == "B").unwrap();
        for seg in stretched.missions[idx].segments.iter_mut() {
            if seg.phase() == Phase::Flight {
                seg.params.time *= 1.5;
            }
        }
        let longer = label_sample(&stretched, &key).unwrap();
        assert!(longer.d_gag >= base.d_gag);
        assert!(longer.d_gm >= base.d_gm);

        // more flights, more damage
        let mut bigger = world.clone();
        bigger.missions[idx].n_flights *= 2;
        let more = label_sample(&bigger, &key).unwrap();
        assert!(more.d_gag > base.d_gag && more.d_gm > base.d_gm);
    }

    #[test]
    fn default_world_lives_are_positive_finite_and_span_the_target_range() {
        let world = generate_fleet(&OracleConfig::default()).unwrap();
        let mut min_life = f64::INFINITY;
        let mut max_life = f64::NEG_INFINITY;
        for key in world.sample_keys() {
            let rec = label_sample(&world, &key).unwrap();
            assert!(rec.life_n.is_finite() && rec.life_n > 0.0, "{key:?}");
            assert!(rec.d_gag > 0.0 && rec.d_gm > 0.0, "{key:?}");
            min_life = min_life.min(rec.life_n);
            max_life = max_life.max(rec.life_n);
        }
        assert!(min_life <= 1e3, "min life {min_life:.3e} should reach 1e3");
        assert!(max_life >= 1e8, "max life {max_life:.3e} should reach 1e8");
    }
}

//! Shared domain types: mission segments, flight parameters, stress vectors
//! and the feature-scaling primitives used by every pipeline stage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of monitored wing locations (principal structural elements).
pub const N_PSE: u8 = 38;

/// Width of the binary PSE encoding (38 < 2^6).
pub const PSE_BITS: usize = 6;

/// Operational segment class within a mission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentClass {
    Taxi,
    Climb,
    Cruise,
    Descent,
    Approach,
}

impl SegmentClass {
    pub const ALL: [SegmentClass; 5] = [
        SegmentClass::Taxi,
        SegmentClass::Climb,
        SegmentClass::Cruise,
        SegmentClass::Descent,
        SegmentClass::Approach,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SegmentClass::Taxi => "taxi",
            SegmentClass::Climb => "climb",
            SegmentClass::Cruise => "cruise",
            SegmentClass::Descent => "descent",
            SegmentClass::Approach => "approach",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "taxi" => Ok(SegmentClass::Taxi),
            "climb" => Ok(SegmentClass::Climb),
            "cruise" => Ok(SegmentClass::Cruise),
            "descent" => Ok(SegmentClass::Descent),
            "approach" => Ok(SegmentClass::Approach),
            other => Err(Error::data(format!("unknown segment class '{other}'"))),
        }
    }
}

/// Ground vs flight typification of a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Ground,
    Flight,
}

/// Taxi is the only ground class; every other class is flight.
pub fn classify_phase(class: SegmentClass) -> Phase {
    match class {
        SegmentClass::Taxi => Phase::Ground,
        _ => Phase::Flight,
    }
}

/// The 12 scalar flight parameters describing one mission segment.
///
/// All values are SI: degrees, m/s, m, s, N, Pa, kg (and % MAC for the
/// center-of-gravity position).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightParams {
    /// Flap extension, degrees.
    pub flaps: f64,
    /// True airspeed, m/s.
    pub tas: f64,
    /// Altitude, m.
    pub altitude: f64,
    /// Segment duration, s.
    pub time: f64,
    /// Distance covered, m.
    pub distance: f64,
    /// Engine thrust, N.
    pub thrust: f64,
    /// Pressure difference at segment altitude, Pa.
    pub pressure: f64,
    /// Aircraft mass, kg.
    pub mass: f64,
    /// Center of gravity position, % of mean aerodynamic chord.
    pub cma_pct: f64,
    /// Zero fuel weight, kg.
    pub zfw: f64,
    /// Payload weight, kg.
    pub pl: f64,
    /// Fuel weight, kg.
    pub fw: f64,
}

impl FlightParams {
    /// Field names in serialization order (CSV column order).
    pub const NAMES: [&'static str; 12] = [
        "flaps", "tas", "altitude", "time", "distance", "thrust", "pressure", "mass", "cma_pct",
        "zfw", "pl", "fw",
    ];

    pub fn to_array(&self) -> [f64; 12] {
        [
            self.flaps,
            self.tas,
            self.altitude,
            self.time,
            self.distance,
            self.thrust,
            self.pressure,
            self.mass,
            self.cma_pct,
            self.zfw,
            self.pl,
            self.fw,
        ]
    }

    pub fn from_array(a: [f64; 12]) -> Self {
        FlightParams {
            flaps: a[0],
            tas: a[1],
            altitude: a[2],
            time: a[3],
            distance: a[4],
            thrust: a[5],
            pressure: a[6],
            mass: a[7],
            cma_pct: a[8],
            zfw: a[9],
            pl: a[10],
            fw: a[11],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.time > 0.0) {
            return Err(Error::invalid(format!("segment time must be > 0, got {}", self.time)));
        }
        if self.tas < 0.0 {
            return Err(Error::invalid(format!("tas must be >= 0, got {}", self.tas)));
        }
        if self.fw < 0.0 {
            return Err(Error::invalid(format!("fuel weight must be >= 0, got {}", self.fw)));
        }
        if self.pl < 0.0 {
            return Err(Error::invalid(format!("payload must be >= 0, got {}", self.pl)));
        }
        if self.mass < self.zfw {
            return Err(Error::invalid(format!(
                "mass {} below zero fuel weight {}",
                self.mass, self.zfw
            )));
        }
        if self.altitude < 0.0 {
            return Err(Error::invalid(format!("altitude must be >= 0, got {}", self.altitude)));
        }
        Ok(())
    }
}

/// Stress response at one PSE for one segment, MPa.
///
/// `one_g` is the equilibrium stress; the increments are the responses to a
/// standard 1.5g vertical maneuver, vertical gust and turn. Ground segments
/// carry zero increments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressVector {
    pub one_g: f64,
    pub d_vman: f64,
    pub d_vgust: f64,
    pub d_turn: f64,
}

impl StressVector {
    pub const NAMES: [&'static str; 4] = ["one_g", "d_vman", "d_vgust", "d_turn"];

    pub fn to_array(&self) -> [f64; 4] {
        [self.one_g, self.d_vman, self.d_vgust, self.d_turn]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        StressVector {
            one_g: a[0],
            d_vman: a[1],
            d_vgust: a[2],
            d_turn: a[3],
        }
    }
}

/// One mission segment: class plus its parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub class: SegmentClass,
    pub params: FlightParams,
}

impl Segment {
    pub fn phase(&self) -> Phase {
        classify_phase(self.class)
    }
}

/// A mission flight plan: an ordered sequence of segments flown `n_flights`
/// times over the aircraft's life.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mission {
    pub id: String,
    pub segments: Vec<Segment>,
    pub n_flights: u32,
}

impl Mission {
    pub fn validate(&self) -> Result<()> {
        let mut ground = 0usize;
        let mut flight = 0usize;
        for seg in &self.segments {
            seg.params.validate()?;
            match seg.phase() {
                Phase::Ground => ground += 1,
                Phase::Flight => flight += 1,
            }
        }
        if ground == 0 || flight == 0 {
            return Err(Error::invalid(format!(
                "mission {} needs at least one ground and one flight segment",
                self.id
            )));
        }
        Ok(())
    }

    pub fn flight_segments(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| s.phase() == Phase::Flight)
    }

    pub fn ground_segments(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| s.phase() == Phase::Ground)
    }

    /// Total time in flight segments, s.
    pub fn t_flight(&self) -> f64 {
        self.flight_segments().map(|s| s.params.time).sum()
    }

    /// Total time in ground segments, s.
    pub fn t_ground(&self) -> f64 {
        self.ground_segments().map(|s| s.params.time).sum()
    }
}

/// Identifies one labeled sample: a {mission, PSE, kt} combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleKey {
    pub mission_id: String,
    pub pse: u8,
    pub kt: f64,
}

/// Checked PSE index, 1..=38.
pub fn check_pse(pse: u8) -> Result<u8> {
    if (1..=N_PSE).contains(&pse) {
        Ok(pse)
    } else {
        Err(Error::invalid(format!("PSE must be in 1..={N_PSE}, got {pse}")))
    }
}

/// Unsigned binary encoding of a PSE index, most-significant bit first.
pub fn binary_encode_pse(pse: u8) -> Result<[u8; PSE_BITS]> {
    check_pse(pse)?;
    let mut bits = [0u8; PSE_BITS];
    for (i, bit) in bits.iter_mut().enumerate() {
        *bit = (pse >> (PSE_BITS - 1 - i)) & 1;
    }
    Ok(bits)
}

/// Per-column min-max scaler mapping the training range of each column onto
/// [0, 1]. Constant columns map to 0 (the inverse then restores the stored
/// minimum).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl MinMaxScaler {
    /// Fit on rows (each row one sample). Columns are fit independently.
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::invalid("cannot fit MinMaxScaler on empty input"));
        };
        let width = first.len();
        let mut mins = vec![f64::INFINITY; width];
        let mut maxs = vec![f64::NEG_INFINITY; width];
        for row in rows {
            if row.len() != width {
                return Err(Error::shape(format!(
                    "inconsistent row width: expected {width}, got {}",
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                if x < mins[j] {
                    mins[j] = x;
                }
                if x > maxs[j] {
                    maxs[j] = x;
                }
            }
        }
        Ok(MinMaxScaler { mins, maxs })
    }

    pub fn width(&self) -> usize {
        self.mins.len()
    }

    fn check_width(&self, row: &[f64]) -> Result<()> {
        if row.len() != self.width() {
            return Err(Error::shape(format!(
                "row width {} does not match scaler width {}",
                row.len(),
                self.width()
            )));
        }
        Ok(())
    }

    /// Forward transform: (x - min) / (max - min), in place per column.
    pub fn transform(&self, row: &[f64]) -> Result<Vec<f64>> {
        self.check_width(row)?;
        Ok(row
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                let span = self.maxs[j] - self.mins[j];
                if span == 0.0 {
                    0.0
                } else {
                    (x - self.mins[j]) / span
                }
            })
            .collect())
    }

    /// Inverse transform: min + x * (max - min).
    pub fn inverse(&self, row: &[f64]) -> Result<Vec<f64>> {
        self.check_width(row)?;
        Ok(row
            .iter()
            .enumerate()
            .map(|(j, &x)| self.mins[j] + x * (self.maxs[j] - self.mins[j]))
            .collect())
    }
}

/// Time-weighted mean: sum(v_i * t_i) / sum(t_i).
pub fn time_weighted_average(values: &[f64], durations: &[f64]) -> Result<f64> {
    if values.is_empty() || values.len() != durations.len() {
        return Err(Error::shape(format!(
            "values ({}) and durations ({}) must be equal-length and nonempty",
            values.len(),
            durations.len()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (&v, &t) in values.iter().zip(durations) {
        if t <= 0.0 {
            return Err(Error::invalid(format!("durations must be > 0, got {t}")));
        }
        num += v * t;
        den += t;
    }
    Ok(num / den)
}

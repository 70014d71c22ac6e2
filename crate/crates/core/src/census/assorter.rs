use crate::census::model::{CensusModel, Household};
use crate::error::{Error, Result};

/// Assorters for the ordered state pair `(s1, s2)`.
///
/// The pair's assertion says the last seat `s1` holds under the census,
/// valued `(pop_s1 + c_s1)/d(r1)`, still beats the next seat `s2` would win,
/// `(pop_s2 + c_s2)/d(r2 + 1)`, when populations are counted by the PES.
/// The household-level assorter is
///
/// ```text
/// a(h) = g_s1(h) / (c·d(r1)) + (g_max - g_s2(h)) / (c·d(r2 + 1))
/// ```
///
/// where `g_s(h)` is the household's residents if it lies in `s`, else 0.
#[derive(Clone, Debug, PartialEq)]
pub struct PairAssorter {
    pub s1: usize,
    pub s2: usize,
    /// Census seats of `s1` and `s2`.
    pub r1: u32,
    pub r2: u32,
    d1: f64,
    d2: f64,
    c: f64,
    g_max: f64,
    /// Margin of the census-count assorter: its mean minus 1/2.
    m: f64,
    z: f64,
}

impl PairAssorter {
    /// Builds the pair's assorters for the census in `households`.
    ///
    /// `census_seats` is the census apportionment. Fails when `s1` holds no
    /// seat (there is nothing to defend) or when the normalising constant is
    /// not positive, in which case the pair's inequality is decided by the
    /// state constants alone.
    pub fn new(model: &CensusModel, s1: usize, s2: usize, census_seats: &[u32], households: &[Household]) -> Result<Self> {
        if s1 == s2 {
            return Err(Error::SameCandidate);
        }
        let (r1, r2) = (census_seats[s1], census_seats[s2]);
        if r1 == 0 {
            return Err(Error::InvalidAssorter(format!(
                "state `{}` holds no seat under the census",
                model.states()[s1]
            )));
        }
        if households.is_empty() {
            return Err(Error::EmptyContest);
        }
        let n = households.len() as f64;
        let d1 = model.divisor().d(r1) as f64;
        let d2 = model.divisor().d(r2 + 1) as f64;
        let g_max = f64::from(model.g_max());
        let (c1, c2) = (model.constants()[s1], model.constants()[s2]);
        let c = 2.0 * (g_max / d2 + c2 / (n * d2) - c1 / (n * d1));
        if c <= 0.0 {
            return Err(Error::DegeneratePair {
                s1: model.states()[s1].clone(),
                s2: model.states()[s2].clone(),
                c,
            });
        }
        let (mut g1, mut g2) = (0u64, 0u64);
        for h in households {
            if h.state == s1 {
                g1 += u64::from(h.census_count);
            } else if h.state == s2 {
                g2 += u64::from(h.census_count);
            }
        }
        let mean = (g1 as f64 / d1 + (n * g_max - g2 as f64) / d2) / (c * n);
        let m = mean - 0.5;
        let z = (g_max / (c * d2)).max(g_max / (c * d1)).max(0.0);
        Ok(Self {
            s1,
            s2,
            r1,
            r2,
            d1,
            d2,
            c,
            g_max,
            m,
            z,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn margin(&self) -> f64 {
        self.m
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Assorter value of a household in `state` with `count` residents.
    pub fn value(&self, state: usize, count: u32) -> f64 {
        let g1 = if state == self.s1 { f64::from(count) } else { 0.0 };
        let g2 = if state == self.s2 { f64::from(count) } else { 0.0 };
        g1 / (self.c * self.d1) + (self.g_max - g2) / (self.c * self.d2)
    }

    /// Comparison assorter from a household's census and PES counts:
    /// `1/2 + (m + a(pes) - a(census)) / (2(z - m))`.
    pub fn comparison(&self, state: usize, census_count: u32, pes_count: u32) -> f64 {
        let diff = self.value(state, pes_count) - self.value(state, census_count);
        0.5 + (self.m + diff) / (2.0 * (self.z - self.m))
    }

    /// Comparison score of a household on which census and PES agree.
    pub fn eta0(&self) -> f64 {
        0.5 + self.m / (2.0 * (self.z - self.m))
    }

    pub fn upper0(&self, delta: f64) -> f64 {
        0.5 + (self.m + delta) / (2.0 * (self.z - self.m))
    }
}

/// Household assorter over PES counts (`use_pes`) or census counts. An
/// unsurveyed household falls back to its census count.
pub fn census_assorter_value(pair: &PairAssorter, h: &Household, use_pes: bool) -> f64 {
    let count = if use_pes { h.pes_count.unwrap_or(h.census_count) } else { h.census_count };
    pair.value(h.state, count)
}

/// Comparison assorter for a household with the given PES count.
pub fn comparison_assorter_value(pair: &PairAssorter, h: &Household, pes_count: u32) -> f64 {
    pair.comparison(h.state, h.census_count, pes_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::model::{apportion, census_populations};
    use crate::highest_averages::Divisor;

    fn hh(state: usize, census: u32) -> Household {
        Household {
            id: String::new(),
            state,
            census_count: census,
            pes_count: Some(census),
            in_pes_frame: true,
        }
    }

    fn setup() -> (CensusModel, Vec<Household>, Vec<u32>) {
        let model = CensusModel::new(
            vec!["A".into(), "B".into(), "C".into()],
            3,
            Divisor::DHondt,
            vec![0.0; 3],
            3,
        )
        .unwrap();
        let households = vec![hh(0, 3), hh(0, 3), hh(0, 2), hh(1, 3), hh(1, 1), hh(2, 1), hh(2, 0)];
        let seats = apportion(&model, &census_populations(&model, &households)).unwrap();
        (model, households, seats)
    }

    #[test]
    fn household_elsewhere_scores_constant() {
        let (model, hs, seats) = setup();
        let p = PairAssorter::new(&model, 0, 1, &seats, &hs).unwrap();
        let k = 3.0 / (p.c * model.divisor().d(seats[1] + 1) as f64);
        for g in 0..=3 {
            assert_eq!(p.value(2, g), k);
        }
        assert_eq!(p.value(1, 3), 0.0);
    }

    #[test]
    fn agreeing_households_score_eta0() {
        let (model, hs, seats) = setup();
        let p = PairAssorter::new(&model, 0, 1, &seats, &hs).unwrap();
        for h in &hs {
            assert!((comparison_assorter_value(&p, h, h.census_count) - p.eta0()).abs() < 1e-15);
        }
        assert!(p.z > p.margin() && p.margin() > 0.0);
    }

    #[test]
    fn margin_matches_mean_over_households() {
        let (model, hs, seats) = setup();
        let p = PairAssorter::new(&model, 0, 1, &seats, &hs).unwrap();
        let mean: f64 = hs.iter().map(|h| census_assorter_value(&p, h, false)).sum::<f64>() / hs.len() as f64;
        assert!((mean - 0.5 - p.margin()).abs() < 1e-14);
    }

    #[test]
    fn seatless_first_state_is_rejected() {
        let (model, hs, seats) = setup();
        let empty = seats.iter().position(|&r| r == 0).expect("C wins nothing");
        assert!(PairAssorter::new(&model, empty, 0, &seats, &hs).is_err());
    }
}

//! Knesset seat allocation and its assertion set.
//!
//! Seats go by D'Hondt to parties with at least a threshold share of the
//! valid votes. Two parties may sign an apparentment; when both pass the
//! threshold they are allocated seats as one unit, and the unit's seats are
//! then split between them by D'Hondt again.
//!
//! The reported allocation is correct exactly when
//! 1. every reportedly-above party truly passes the threshold,
//! 2. every reportedly-below party truly fails it, and
//! 3. no seat should move between any two units (or between the two members
//!    of an alliance): for holder `h` and gainer `g`,
//!    `v(h)/s(h) > v(g)/(s(g)+1)`.
//!
//! [`generate_assertions`] emits one assorter per condition.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::assorter::{half, ratio, Assorter};
use crate::contest::{BallotType, Contest, Tally};
use crate::error::{Error, Result};
use crate::highest_averages::{highest_averages, Divisor, Tie};

pub use crate::assorter::assertion_margin;

pub const DEFAULT_SEATS: u32 = 120;

/// The 3.25% threshold.
pub fn default_threshold() -> BigRational {
    ratio(13, 400)
}

#[derive(Clone, Debug)]
pub struct KnessetContest {
    contest: Contest,
    seats: u32,
    threshold: BigRational,
    apparentments: Vec<(BallotType, BallotType)>,
}

impl KnessetContest {
    pub fn new(
        contest: Contest,
        seats: u32,
        threshold: BigRational,
        apparentments: Vec<(BallotType, BallotType)>,
    ) -> Result<Self> {
        if seats == 0 {
            return Err(Error::InvalidConfig("seat count must be positive".into()));
        }
        if !(threshold.is_positive() && threshold < BigRational::one()) {
            return Err(Error::InvalidConfig(format!("threshold {threshold} is not in (0, 1)")));
        }
        let mut signed = HashSet::new();
        for &(a, b) in &apparentments {
            if a == b || contest.is_invalid(a) || contest.is_invalid(b) {
                return Err(Error::InvalidConfig("an apparentment needs two distinct parties".into()));
            }
            for p in [a, b] {
                if !signed.insert(p) {
                    return Err(Error::InvalidConfig(format!(
                        "party `{}` signs more than one apparentment",
                        contest.name(p)
                    )));
                }
            }
        }
        Ok(Self {
            contest,
            seats,
            threshold,
            apparentments,
        })
    }

    /// 120 seats, 3.25% threshold, no apparentments.
    pub fn with_defaults(contest: Contest) -> Self {
        Self::new(contest, DEFAULT_SEATS, default_threshold(), Vec::new()).expect("defaults are valid")
    }

    pub fn contest(&self) -> &Contest {
        &self.contest
    }

    pub fn seats(&self) -> u32 {
        self.seats
    }

    pub fn threshold(&self) -> &BigRational {
        &self.threshold
    }

    pub fn apparentments(&self) -> &[(BallotType, BallotType)] {
        &self.apparentments
    }

    pub fn partner(&self, p: BallotType) -> Option<BallotType> {
        self.apparentments.iter().find_map(|&(a, b)| {
            if a == p {
                Some(b)
            } else if b == p {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Whether `p` has at least the threshold share of valid votes.
    pub fn is_above_threshold(&self, tally: &Tally, p: BallotType) -> bool {
        let valid = BigRational::from_integer(BigInt::from(tally.valid(&self.contest)));
        BigRational::from_integer(BigInt::from(tally.get(p))) >= &self.threshold * valid
    }

    /// Seat-allocation units for a tally: parties above the threshold,
    /// alliances merged when both members pass. Ordered by first member.
    pub fn units(&self, tally: &Tally) -> Vec<Vec<BallotType>> {
        let above: Vec<BallotType> = self
            .contest
            .parties()
            .filter(|&p| self.is_above_threshold(tally, p))
            .collect();
        let mut out = Vec::new();
        let mut used = HashSet::new();
        for &p in &above {
            if !used.insert(p) {
                continue;
            }
            match self.partner(p).filter(|q| above.contains(q)) {
                Some(q) => {
                    used.insert(q);
                    out.push(vec![p, q]);
                }
                None => out.push(vec![p]),
            }
        }
        out
    }
}

/// Seats per party, indexed by ballot type; invalid always holds zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeatAllocation {
    seats: Vec<u32>,
}

impl SeatAllocation {
    pub fn from_counts(seats: Vec<u32>) -> Self {
        Self { seats }
    }

    pub fn get(&self, p: BallotType) -> u32 {
        self.seats[p.index()]
    }

    pub fn counts(&self) -> &[u32] {
        &self.seats
    }

    pub fn total(&self) -> u32 {
        self.seats.iter().sum()
    }

    fn of_unit(&self, unit: &[BallotType]) -> u32 {
        unit.iter().map(|&p| self.get(p)).sum()
    }
}

/// Allocates seats: threshold, apparentment merge, D'Hondt over units, then
/// D'Hondt inside each alliance.
pub fn allocate_seats(kc: &KnessetContest, tally: &Tally) -> Result<SeatAllocation> {
    let tie = |_: Tie| Error::AllocationTie;
    let units = kc.units(tally);
    if units.is_empty() {
        return Err(Error::InvalidConfig("no party passes the threshold".into()));
    }
    let votes: Vec<u64> = units.iter().map(|u| u.iter().map(|&p| tally.get(p)).sum()).collect();
    let unit_seats = highest_averages(&votes, kc.seats, Divisor::DHondt).map_err(tie)?;
    let mut seats = vec![0u32; kc.contest.len()];
    for (unit, &s) in units.iter().zip(&unit_seats) {
        if let [p] = unit[..] {
            seats[p.index()] = s;
        } else {
            let member_votes: Vec<u64> = unit.iter().map(|&p| tally.get(p)).collect();
            let split = highest_averages(&member_votes, s, Divisor::DHondt).map_err(tie)?;
            for (&p, &k) in unit.iter().zip(&split) {
                seats[p.index()] = k;
            }
        }
    }
    Ok(SeatAllocation { seats })
}

fn unit_name(contest: &Contest, unit: &[BallotType]) -> String {
    unit.iter().map(|&p| contest.name(p)).collect::<Vec<_>>().join("+")
}

/// `p` passes the threshold: `1/(2t)` for `p`, `1/2` for invalid, 0 else.
pub fn above_threshold_assorter(kc: &KnessetContest, p: BallotType) -> Result<Assorter> {
    let c = &kc.contest;
    let top = (BigRational::from_integer(BigInt::from(2)) * &kc.threshold).recip();
    let values = c
        .ballot_types()
        .map(|b| {
            if b == p {
                top.clone()
            } else if c.is_invalid(b) {
                half()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    Assorter::new(c, values, top, format!("above:{}", c.name(p)))
}

/// `p` fails the threshold: 0 for `p`, `1/2` for invalid, `1/(2(1-t))` else.
pub fn below_threshold_assorter(kc: &KnessetContest, p: BallotType) -> Result<Assorter> {
    let c = &kc.contest;
    let top = (BigRational::from_integer(BigInt::from(2)) * (BigRational::one() - &kc.threshold)).recip();
    let values = c
        .ballot_types()
        .map(|b| {
            if b == p {
                BigRational::zero()
            } else if c.is_invalid(b) {
                half()
            } else {
                top.clone()
            }
        })
        .collect();
    Assorter::new(c, values, top, format!("below:{}", c.name(p)))
}

/// No seat moves from `holder` to `gainer`:
/// `v(holder)/s_h > v(gainer)/(s_g + 1)`, or with `weakened`,
/// `v(holder)/(s_h - 1) > v(gainer)/(s_g + 2)`, i.e. at most one seat moves.
///
/// Holder ballots score `1/2 + k/(2 s_h)` with `k = s_g + 1`
/// (weakened: `(s_g + 2)/(2(s_h - 1))`), gainer ballots 0, others 1/2.
pub fn move_seat_assorter(
    contest: &Contest,
    gainer: &[BallotType],
    holder: &[BallotType],
    s_gainer: u32,
    s_holder: u32,
    weakened: bool,
) -> Result<Assorter> {
    let holder_name = unit_name(contest, holder);
    let coeff = if weakened {
        if s_holder <= 1 {
            return Err(Error::CannotWeaken(holder_name));
        }
        ratio(i64::from(s_gainer) + 2, 2 * (i64::from(s_holder) - 1))
    } else {
        if s_holder == 0 {
            return Err(Error::InvalidAssorter(format!("`{holder_name}` holds no seat to move")));
        }
        ratio(i64::from(s_gainer) + 1, 2 * i64::from(s_holder))
    };
    let top = half() + coeff;
    let values = contest
        .ballot_types()
        .map(|b| {
            if holder.contains(&b) {
                top.clone()
            } else if gainer.contains(&b) {
                BigRational::zero()
            } else {
                half()
            }
        })
        .collect();
    let label = format!(
        "{}:{}->{}",
        if weakened { "no-move2" } else { "no-move" },
        holder_name,
        unit_name(contest, gainer)
    );
    Assorter::new(contest, values, top, label)
}

/// The full assertion set for a reported tally and its allocation.
///
/// `weaken` lists `(gainer, holder)` party pairs whose move-seat assertion is
/// replaced by the one-seat-tolerant variant. A pair matches an assertion
/// between units when the gainer belongs to the gaining unit and the holder
/// to the holding unit. Pairs whose holder has no reported seat are skipped.
pub fn generate_assertions(
    kc: &KnessetContest,
    reported: &Tally,
    reported_seats: &SeatAllocation,
    weaken: &[(BallotType, BallotType)],
) -> Result<Vec<Assorter>> {
    let c = &kc.contest;
    let mut out = Vec::new();
    for p in c.parties() {
        if kc.is_above_threshold(reported, p) {
            out.push(above_threshold_assorter(kc, p)?);
        } else {
            out.push(below_threshold_assorter(kc, p)?);
        }
    }
    let mut used_weaken = vec![false; weaken.len()];
    let mut wants_weak = |gainer: &[BallotType], holder: &[BallotType]| {
        let mut hit = false;
        for (i, (g, h)) in weaken.iter().enumerate() {
            if gainer.contains(g) && holder.contains(h) {
                used_weaken[i] = true;
                hit = true;
            }
        }
        hit
    };
    let units = kc.units(reported);
    for gainer in &units {
        for holder in &units {
            if gainer == holder {
                continue;
            }
            let s_h = reported_seats.of_unit(holder);
            if s_h == 0 {
                continue;
            }
            let weak = wants_weak(gainer, holder);
            out.push(move_seat_assorter(c, gainer, holder, reported_seats.of_unit(gainer), s_h, weak)?);
        }
    }
    for unit in units.iter().filter(|u| u.len() == 2) {
        for (g, h) in [(unit[0], unit[1]), (unit[1], unit[0])] {
            let s_h = reported_seats.get(h);
            if s_h == 0 {
                continue;
            }
            let weak = wants_weak(&[g], &[h]);
            out.push(move_seat_assorter(c, &[g], &[h], reported_seats.get(g), s_h, weak)?);
        }
    }
    if let Some(i) = used_weaken.iter().position(|used| !used) {
        let (g, h) = weaken[i];
        return Err(Error::InvalidConfig(format!(
            "no move-seat assertion from `{}` to `{}` to weaken",
            c.name(h),
            c.name(g)
        )));
    }
    Ok(out)
}

/// Margin as a fraction of the ballots, for display.
pub fn margin_fraction(margin: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        margin.to_f64().unwrap_or(0.0) / total as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contest3() -> Contest {
        Contest::new(["A", "B", "C"]).unwrap()
    }

    fn kc(seats: u32, t: BigRational, app: Vec<(BallotType, BallotType)>) -> KnessetContest {
        KnessetContest::new(contest3(), seats, t, app).unwrap()
    }

    #[test]
    fn plain_dhondt_without_threshold_effects() {
        let k = kc(5, ratio(1, 100), vec![]);
        let t = Tally::from_counts(k.contest(), vec![100, 60, 40, 0]).unwrap();
        assert_eq!(allocate_seats(&k, &t).unwrap().counts(), &[3, 1, 1, 0]);
    }

    #[test]
    fn one_party_above_takes_all() {
        let k = kc(7, ratio(1, 10), vec![]);
        let t = Tally::from_counts(k.contest(), vec![95, 3, 2, 10]).unwrap();
        assert_eq!(allocate_seats(&k, &t).unwrap().counts(), &[7, 0, 0, 0]);
    }

    #[test]
    fn apparentment_pools_votes() {
        let c = contest3();
        let (b, cc) = (c.party("B").unwrap(), c.party("C").unwrap());
        let k = KnessetContest::new(c.clone(), 4, ratio(1, 100), vec![(b, cc)]).unwrap();
        let plain = KnessetContest::new(c.clone(), 4, ratio(1, 100), vec![]).unwrap();
        // Alone: 70, 35, 23.3, 17.5 all go to A. Allied B+C = 30 beats 23.3,
        // and B outpolls C for the alliance's only seat.
        let t = Tally::from_counts(&c, vec![70, 16, 14, 0]).unwrap();
        assert_eq!(allocate_seats(&plain, &t).unwrap().counts(), &[4, 0, 0, 0]);
        assert_eq!(allocate_seats(&k, &t).unwrap().counts(), &[3, 1, 0, 0]);
    }

    #[test]
    fn apparentment_ignored_when_member_below() {
        let c = contest3();
        let (b, cc) = (c.party("B").unwrap(), c.party("C").unwrap());
        let k = KnessetContest::new(c.clone(), 4, ratio(1, 10), vec![(b, cc)]).unwrap();
        let t = Tally::from_counts(&c, vec![60, 35, 5, 0]).unwrap();
        assert_eq!(k.units(&t).len(), 2);
        assert_eq!(allocate_seats(&k, &t).unwrap().get(cc), 0);
    }

    #[test]
    fn tie_is_an_error() {
        let k = kc(1, ratio(1, 100), vec![]);
        let t = Tally::from_counts(k.contest(), vec![10, 10, 1, 0]).unwrap();
        assert!(matches!(allocate_seats(&k, &t), Err(Error::AllocationTie)));
    }

    #[test]
    fn double_apparentment_rejected() {
        let c = contest3();
        let (a, b, cc) = (c.party("A").unwrap(), c.party("B").unwrap(), c.party("C").unwrap());
        assert!(KnessetContest::new(c, 4, ratio(1, 10), vec![(a, b), (b, cc)]).is_err());
    }

    #[test]
    fn assertion_count_two_above_one_below() {
        let k = kc(4, ratio(1, 10), vec![]);
        let t = Tally::from_counts(k.contest(), vec![60, 35, 5, 0]).unwrap();
        let seats = allocate_seats(&k, &t).unwrap();
        let a = generate_assertions(&k, &t, &seats, &[]).unwrap();
        let labels: Vec<&str> = a.iter().map(Assorter::label).collect();
        assert_eq!(labels, ["above:A", "above:B", "below:C", "no-move:B->A", "no-move:A->B"]);
        assert!(a.iter().all(|x| x.holds(&t)));
    }

    #[test]
    fn weakened_value_example() {
        let c = contest3();
        let (a, b) = (c.party("A").unwrap(), c.party("B").unwrap());
        let asr = move_seat_assorter(&c, &[a], &[b], 5, 4, true).unwrap();
        assert_eq!(asr.value(b), &(half() + ratio(7, 6)));
        assert_eq!(asr.value(a), &BigRational::zero());
        assert!(matches!(
            move_seat_assorter(&c, &[a], &[b], 5, 1, true),
            Err(Error::CannotWeaken(_))
        ));
    }

    #[test]
    fn threshold_assorter_bounds() {
        let k = kc(4, ratio(1, 10), vec![]);
        let p = k.contest().party("A").unwrap();
        assert_eq!(above_threshold_assorter(&k, p).unwrap().upper(), &ratio(5, 1));
        assert_eq!(below_threshold_assorter(&k, p).unwrap().upper(), &ratio(5, 9));
    }
}

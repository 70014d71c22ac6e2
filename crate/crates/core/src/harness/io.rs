//! Reading and writing the crate's file formats.
//!
//! * Contest tally: `party,reported_votes`, with the reserved row
//!   `__invalid__` for invalid ballots.
//! * Batch tallies: `batch_id,party,reported_votes,true_votes`, one row per
//!   batch and party; optional declared sizes `batch_id,declared_size`.
//! * Households: `household_id,district,census_count,pes_count,surveyed`,
//!   `pes_count` blank when unsurveyed, plus an optional `in_pes_frame`
//!   column (default true).
//! * Districts: `district,population,c_constant`, `c_constant` optional.
//! * Household sizes: `residents,probability`.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;

use crate::batch::{pad_missing_ballots, BatchRecord};
use crate::census::cyprus::{District, HouseholdDistribution};
use crate::census::model::{CensusModel, Household};
use crate::contest::{Contest, Tally, INVALID_LABEL};
use crate::error::{Error, Result};

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::Input(format!("cannot open {}: {e}", path.display())))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn require_headers(rdr: &mut csv::Reader<File>, path: &Path, required: &[&str]) -> Result<()> {
    let headers = rdr.headers()?.clone();
    for col in required {
        if !headers.iter().any(|h| h == *col) {
            return Err(Error::Input(format!("{}: missing column `{col}`", path.display())));
        }
    }
    Ok(())
}

#[derive(Deserialize)]
struct ContestRow {
    party: String,
    reported_votes: u64,
}

/// Reads a contest tally; parties keep file order.
pub fn read_contest_csv(path: &Path) -> Result<(Contest, Tally)> {
    let mut rdr = reader(path)?;
    require_headers(&mut rdr, path, &["party", "reported_votes"])?;
    let mut rows = Vec::new();
    for row in rdr.deserialize() {
        let row: ContestRow = row?;
        rows.push(row);
    }
    let contest = Contest::new(rows.iter().filter(|r| r.party != INVALID_LABEL).map(|r| r.party.clone()))?;
    let mut seen_invalid = false;
    let mut tally = Tally::zeros(&contest);
    for r in &rows {
        if r.party == INVALID_LABEL {
            if seen_invalid {
                return Err(Error::DuplicateBallotType(INVALID_LABEL.into()));
            }
            seen_invalid = true;
        }
        tally.add(contest.lookup(&r.party)?, r.reported_votes);
    }
    Ok((contest, tally))
}

/// Writes a contest tally in the same format.
pub fn write_contest_csv(path: &Path, contest: &Contest, tally: &Tally) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["party", "reported_votes"])?;
    for t in contest.ballot_types() {
        w.write_record([contest.name(t), &tally.get(t).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct BatchRow {
    batch_id: String,
    party: String,
    reported_votes: u64,
    true_votes: u64,
}

/// Reads batch tallies. With `contest` given, parties outside it are an
/// error; otherwise the contest is built from the parties in file order.
///
/// Batches come back unpadded, in order of first appearance.
pub fn read_batches_csv(path: &Path, contest: Option<&Contest>) -> Result<(Contest, Vec<BatchRecord>)> {
    let mut rdr = reader(path)?;
    require_headers(&mut rdr, path, &["batch_id", "party", "reported_votes", "true_votes"])?;
    let mut rows = Vec::new();
    for row in rdr.deserialize() {
        let row: BatchRow = row?;
        rows.push(row);
    }
    let contest = match contest {
        Some(c) => c.clone(),
        None => {
            let mut names: Vec<&str> = Vec::new();
            for r in &rows {
                if r.party != INVALID_LABEL && !names.contains(&r.party.as_str()) {
                    names.push(&r.party);
                }
            }
            Contest::new(names)?
        }
    };
    let mut order: Vec<String> = Vec::new();
    let mut tallies: HashMap<String, (Tally, Tally)> = HashMap::new();
    for r in &rows {
        let t = contest.lookup(&r.party)?;
        let entry = tallies.entry(r.batch_id.clone()).or_insert_with(|| {
            order.push(r.batch_id.clone());
            (Tally::zeros(&contest), Tally::zeros(&contest))
        });
        entry.0.add(t, r.reported_votes);
        entry.1.add(t, r.true_votes);
    }
    if order.is_empty() {
        return Err(Error::NoBatches);
    }
    let batches = order
        .into_iter()
        .map(|id| {
            let (reported, truth) = tallies.remove(&id).expect("recorded");
            BatchRecord::unpadded(id, reported, truth)
        })
        .collect();
    Ok((contest, batches))
}

/// Writes batch tallies, one row per batch and ballot type.
pub fn write_batches_csv(path: &Path, contest: &Contest, batches: &[BatchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["batch_id", "party", "reported_votes", "true_votes"])?;
    for b in batches {
        for t in contest.ballot_types() {
            w.write_record([
                b.id.as_str(),
                contest.name(t),
                &b.reported.get(t).to_string(),
                &b.truth.get(t).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct DeclaredRow {
    batch_id: String,
    declared_size: u64,
}

/// Reads declared batch sizes.
pub fn read_declared_sizes(path: &Path) -> Result<BTreeMap<String, u64>> {
    let mut rdr = reader(path)?;
    require_headers(&mut rdr, path, &["batch_id", "declared_size"])?;
    let mut out = BTreeMap::new();
    for row in rdr.deserialize() {
        let row: DeclaredRow = row?;
        if out.insert(row.batch_id.clone(), row.declared_size).is_some() {
            return Err(Error::DuplicateBatch(row.batch_id));
        }
    }
    Ok(out)
}

/// Pads batches to their declared sizes, or to the larger of their two
/// counts when a batch has no declared size.
pub fn pad_batches(contest: &Contest, batches: &[BatchRecord], declared: &BTreeMap<String, u64>) -> Result<Vec<BatchRecord>> {
    for id in declared.keys() {
        if !batches.iter().any(|b| &b.id == id) {
            return Err(Error::Input(format!("declared size for unknown batch `{id}`")));
        }
    }
    batches
        .iter()
        .map(|b| pad_missing_ballots(contest, b, declared.get(&b.id).copied().unwrap_or(b.size())))
        .collect()
}

#[derive(Deserialize)]
struct HouseholdRow {
    household_id: String,
    district: String,
    census_count: u32,
    pes_count: Option<u32>,
    surveyed: String,
    #[serde(default)]
    in_pes_frame: Option<String>,
}

fn parse_bool(s: &str, what: &str) -> Result<bool> {
    match s.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" => Ok(true),
        "0" | "false" | "no" | "n" | "" => Ok(false),
        _ => Err(Error::Input(format!("bad boolean `{s}` in {what}"))),
    }
}

/// Reads households for a model whose states are the district names.
pub fn read_households_csv(path: &Path, model: &CensusModel) -> Result<Vec<Household>> {
    let mut rdr = reader(path)?;
    require_headers(
        &mut rdr,
        path,
        &["household_id", "district", "census_count", "pes_count", "surveyed"],
    )?;
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let row: HouseholdRow = row?;
        let surveyed = parse_bool(&row.surveyed, "surveyed")?;
        let in_frame = match &row.in_pes_frame {
            Some(s) if !s.is_empty() => parse_bool(s, "in_pes_frame")?,
            _ => true,
        };
        let pes_count = match (surveyed, row.pes_count) {
            (true, Some(g)) => Some(g),
            (true, None) => {
                return Err(Error::Input(format!(
                    "household `{}` is surveyed but has no pes_count",
                    row.household_id
                )))
            }
            (false, Some(_)) => {
                return Err(Error::Input(format!(
                    "household `{}` has a pes_count but is not surveyed",
                    row.household_id
                )))
            }
            (false, None) => None,
        };
        out.push(Household {
            id: row.household_id,
            state: model.state_index(&row.district)?,
            census_count: row.census_count,
            pes_count,
            in_pes_frame: in_frame,
        });
    }
    crate::census::model::validate_households(model, &out)?;
    Ok(out)
}

/// Writes households in the same format.
pub fn write_households_csv(path: &Path, model: &CensusModel, households: &[Household]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["household_id", "district", "census_count", "pes_count", "surveyed", "in_pes_frame"])?;
    for h in households {
        w.write_record([
            h.id.as_str(),
            model.states()[h.state].as_str(),
            &h.census_count.to_string(),
            &h.pes_count.map(|g| g.to_string()).unwrap_or_default(),
            if h.surveyed() { "true" } else { "false" },
            if h.in_pes_frame { "true" } else { "false" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads district populations and optional constants.
pub fn read_districts_csv(path: &Path) -> Result<Vec<District>> {
    let mut rdr = reader(path)?;
    require_headers(&mut rdr, path, &["district", "population"])?;
    let mut out: Vec<District> = Vec::new();
    for row in rdr.deserialize() {
        let row: District = row?;
        if out.iter().any(|d| d.district == row.district) {
            return Err(Error::Input(format!("duplicate district `{}`", row.district)));
        }
        out.push(row);
    }
    if out.is_empty() {
        return Err(Error::Input(format!("{}: no districts", path.display())));
    }
    Ok(out)
}

#[derive(Deserialize)]
struct SizeRow {
    residents: u32,
    probability: f64,
}

/// Reads a residents-per-household distribution.
pub fn read_distribution_csv(path: &Path, g_max: u32) -> Result<HouseholdDistribution> {
    let mut rdr = reader(path)?;
    require_headers(&mut rdr, path, &["residents", "probability"])?;
    let mut entries = Vec::new();
    for row in rdr.deserialize() {
        let row: SizeRow = row?;
        entries.push((row.residents, row.probability));
    }
    HouseholdDistribution::new(&entries, g_max)
}

/// Parses a decimal such as `0.0325` or a fraction such as `13/400` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidConfig(format!("`{s}` is not a decimal or fraction"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assorter::ratio;
    use std::io::Write;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        File::create(&path).unwrap().write_all(body.as_bytes()).unwrap();
        path
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_rational("0.0325").unwrap(), ratio(13, 400));
        assert_eq!(parse_rational("13/400").unwrap(), ratio(13, 400));
        assert_eq!(parse_rational("3.25e-2").unwrap(), ratio(13, 400));
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn contest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(&dir, "c.csv", "party,reported_votes\nA,10\n__invalid__,2\nB,5\n");
        let (c, t) = read_contest_csv(&path).unwrap();
        assert_eq!(c.num_parties(), 2);
        assert_eq!(t.total(), 17);
        let out = dir.path().join("o.csv");
        write_contest_csv(&out, &c, &t).unwrap();
        let (c2, t2) = read_contest_csv(&out).unwrap();
        assert_eq!((c2, t2), (c, t));
    }

    #[test]
    fn wrong_columns_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(&dir, "c.csv", "name,votes\nA,10\n");
        assert!(matches!(read_contest_csv(&path), Err(Error::Input(_))));
    }

    #[test]
    fn batches_with_unknown_party_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            &dir,
            "b.csv",
            "batch_id,party,reported_votes,true_votes\n1,A,5,5\n1,Z,1,1\n",
        );
        let contest = Contest::new(["A"]).unwrap();
        assert!(matches!(
            read_batches_csv(&path, Some(&contest)),
            Err(Error::UnknownBallotType(_))
        ));
        let (c, b) = read_batches_csv(&path, None).unwrap();
        assert_eq!(c.num_parties(), 2);
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn declared_sizes_pad() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            &dir,
            "b.csv",
            "batch_id,party,reported_votes,true_votes\nx,A,5,4\nx,B,3,3\ny,A,1,1\n",
        );
        let sizes = write(&dir, "s.csv", "batch_id,declared_size\nx,10\n");
        let (c, b) = read_batches_csv(&path, None).unwrap();
        let padded = pad_batches(&c, &b, &read_declared_sizes(&sizes).unwrap()).unwrap();
        assert_eq!(padded[0].size(), 10);
        assert_eq!(padded[0].truth.get(c.invalid()), 3);
        assert_eq!(padded[1].size(), 1);
    }
}

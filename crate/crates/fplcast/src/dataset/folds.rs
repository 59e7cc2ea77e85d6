//! Team-based cross-validation folds.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::types::{Season, TeamName};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FoldId(pub String);

impl FoldId {
    pub fn new(id: impl Into<String>) -> FoldId {
        FoldId(id.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for FoldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Curated team -> fold mapping with the number of development seasons each
/// team appears in.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldTable {
    assignments: BTreeMap<TeamName, (FoldId, u8)>,
}

/// The default five-fold split of the 26 development-era Premier League
/// teams; every fold totals 16 team-seasons.
const DEFAULT_FOLDS: &[(&str, &str, u8)] = &[
    ("Everton", "C1", 4),
    ("Leeds", "C1", 3),
    ("Luton", "C1", 1),
    ("Manchester United", "C1", 4),
    ("West Ham", "C1", 4),
    ("Aston Villa", "C2", 4),
    ("Burnley", "C2", 3),
    ("Leicester", "C2", 3),
    ("Tottenham", "C2", 4),
    ("Watford", "C2", 1),
    ("West Bromwich", "C2", 1),
    ("Bournemouth", "C3", 2),
    ("Brentford", "C3", 3),
    ("Manchester City", "C3", 4),
    ("Southampton", "C3", 3),
    ("Wolverhampton", "C3", 4),
    ("Brighton", "C4", 4),
    ("Chelsea", "C4", 4),
    ("Crystal Palace", "C4", 4),
    ("Nottingham Forest", "C4", 2),
    ("Sheffield United", "C4", 2),
    ("Arsenal", "C5", 4),
    ("Fulham", "C5", 3),
    ("Liverpool", "C5", 4),
    ("Newcastle", "C5", 4),
    ("Norwich", "C5", 1),
];

impl FoldTable {
    pub fn paper_default() -> &'static FoldTable {
        static TABLE: OnceLock<FoldTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            let assignments = DEFAULT_FOLDS
                .iter()
                .map(|&(team, fold, seasons)| {
                    (TeamName::new(team), (FoldId::new(fold), seasons))
                })
                .collect();
            FoldTable { assignments }
        })
    }

    /// Load a custom fold table from CSV with columns team,fold,seasons.
    pub fn from_csv(path: &Path) -> Result<FoldTable> {
        let mut rdr = csv::Reader::from_path(path)
            .map_err(|e| Error::Other(format!("fold table {}: {e}", path.display())))?;
        let mut assignments = BTreeMap::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row.map_err(|e| Error::Parse {
                file: path.display().to_string(),
                row: i + 2,
                column: "-".into(),
                message: e.to_string(),
            })?;
            if row.len() < 3 {
                return Err(Error::Parse {
                    file: path.display().to_string(),
                    row: i + 2,
                    column: "-".into(),
                    message: "expected team,fold,seasons".into(),
                });
            }
            let seasons: u8 = row[2].trim().parse().map_err(|_| Error::Parse {
                file: path.display().to_string(),
                row: i + 2,
                column: "seasons".into(),
                message: format!("not an integer: {}", &row[2]),
            })?;
            let team = TeamName::new(row[0].trim());
            if assignments
                .insert(team.clone(), (FoldId::new(row[1].trim()), seasons))
                .is_some()
            {
                return Err(Error::DuplicateKey(format!("fold table team {team}")));
            }
        }
        if assignments.is_empty() {
            return Err(Error::InvalidInput("empty fold table".into()));
        }
        Ok(FoldTable { assignments })
    }

    pub fn fold_of(&self, team: &TeamName) -> Result<&FoldId> {
        self.assignments
            .get(team)
            .map(|(f, _)| f)
            .ok_or_else(|| Error::UnknownTeam(team.to_string()))
    }

    pub fn teams(&self) -> impl Iterator<Item = (&TeamName, &FoldId, u8)> {
        self.assignments.iter().map(|(t, (f, s))| (t, f, *s))
    }

    pub fn n_teams(&self) -> usize {
        self.assignments.len()
    }

    /// Sorted distinct fold ids.
    pub fn fold_ids(&self) -> Vec<FoldId> {
        let mut ids: Vec<FoldId> = self
            .assignments
            .values()
            .map(|(f, _)| f.clone())
            .collect();
        ids.sort();
        ids.dedup();
        ids
    }

    /// Expected team-season totals per fold, from the curated season counts.
    pub fn expected_team_seasons(&self) -> BTreeMap<FoldId, u32> {
        let mut totals: BTreeMap<FoldId, u32> = BTreeMap::new();
        for (fold, seasons) in self.assignments.values() {
            *totals.entry(fold.clone()).or_insert(0) += u32::from(*seasons);
        }
        totals
    }
}

/// Concrete fold assignment of an observed team-season multiset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub by_team: BTreeMap<TeamName, FoldId>,
    /// Observed distinct team-season count per fold.
    pub team_seasons_per_fold: BTreeMap<FoldId, usize>,
}

/// Map observed (team, season) pairs onto folds. Unknown teams are a hard
/// error; the returned counts are over distinct team-seasons.
pub fn assign_folds(
    team_seasons: &[(TeamName, Season)],
    table: &FoldTable,
) -> Result<FoldAssignment> {
    let mut by_team = BTreeMap::new();
    let mut distinct: Vec<(TeamName, Season)> = team_seasons.to_vec();
    distinct.sort();
    distinct.dedup();

    let mut team_seasons_per_fold: BTreeMap<FoldId, usize> = BTreeMap::new();
    for (team, _season) in &distinct {
        let fold = table.fold_of(team)?;
        by_team.insert(team.clone(), fold.clone());
        *team_seasons_per_fold.entry(fold.clone()).or_insert(0) += 1;
    }
    Ok(FoldAssignment {
        by_team,
        team_seasons_per_fold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_examples() {
        let table = FoldTable::paper_default();
        assert_eq!(
            table.fold_of(&TeamName::new("Everton")).unwrap().as_str(),
            "C1"
        );
        assert_eq!(
            table.fold_of(&TeamName::new("Arsenal")).unwrap().as_str(),
            "C5"
        );
        assert_eq!(table.n_teams(), 26);
    }

    #[test]
    fn every_fold_totals_sixteen_team_seasons() {
        let totals = FoldTable::paper_default().expected_team_seasons();
        assert_eq!(totals.len(), 5);
        for (_, n) in totals {
            assert_eq!(n, 16);
        }
    }

    #[test]
    fn unknown_team_is_an_error() {
        let table = FoldTable::paper_default();
        assert!(table.fold_of(&TeamName::new("Atlantis FC")).is_err());
    }

    #[test]
    fn assign_counts_distinct_team_seasons() {
        let table = FoldTable::paper_default();
        let pairs = vec![
            (TeamName::new("Everton"), "2020-21".to_string()),
            (TeamName::new("Everton"), "2020-21".to_string()),
            (TeamName::new("Everton"), "2021-22".to_string()),
            (TeamName::new("Arsenal"), "2020-21".to_string()),
        ];
        let a = assign_folds(&pairs, table).unwrap();
        assert_eq!(a.team_seasons_per_fold[&FoldId::new("C1")], 2);
        assert_eq!(a.team_seasons_per_fold[&FoldId::new("C5")], 1);
    }
}

//! League standings derived from goals scored and conceded.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::types::TeamName;

/// Cumulative goals and average-rank standings for one season at one point
/// in time. Ordering is goal difference then goals scored; tied teams share
/// the average of their rank positions.
#[derive(Debug, Clone, PartialEq)]
pub struct LeagueTable {
    entries: BTreeMap<TeamName, (i64, i64)>,
    ranks: BTreeMap<TeamName, f64>,
}

impl LeagueTable {
    /// Build from the team universe and per-match results (team, scored,
    /// conceded). Teams without results rank by 0-0.
    pub fn build<'a, I>(teams: &[TeamName], results: I) -> LeagueTable
    where
        I: IntoIterator<Item = (&'a TeamName, u32, u32)>,
    {
        let mut entries: BTreeMap<TeamName, (i64, i64)> =
            teams.iter().map(|t| (t.clone(), (0, 0))).collect();
        for (team, scored, conceded) in results {
            let e = entries.entry(team.clone()).or_insert((0, 0));
            e.0 += i64::from(scored);
            e.1 += i64::from(conceded);
        }
        let ranks = compute_ranks(&entries);
        LeagueTable { entries, ranks }
    }

    pub fn n_teams(&self) -> usize {
        self.entries.len()
    }

    pub fn goals_for(&self, team: &TeamName) -> Option<(i64, i64)> {
        self.entries.get(team).copied()
    }

    pub fn rank(&self, team: &TeamName) -> Result<f64> {
        self.ranks
            .get(team)
            .copied()
            .ok_or_else(|| Error::UnknownTeam(team.to_string()))
    }
}

fn compute_ranks(entries: &BTreeMap<TeamName, (i64, i64)>) -> BTreeMap<TeamName, f64> {
    // sort by goal difference desc, goals scored desc; BTreeMap iteration
    // already fixes a deterministic order inside ties
    let mut order: Vec<(&TeamName, i64, i64)> = entries
        .iter()
        .map(|(t, &(gf, ga))| (t, gf - ga, gf))
        .collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(b.2.cmp(&a.2)));

    let mut ranks = BTreeMap::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && order[j + 1].1 == order[i].1 && order[j + 1].2 == order[i].2 {
            j += 1;
        }
        // positions i+1 ..= j+1 share the average rank
        let avg = (i + 1 + j + 1) as f64 / 2.0;
        for k in i..=j {
            ranks.insert(order[k].0.clone(), avg);
        }
        i = j + 1;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn teams(names: &[&str]) -> Vec<TeamName> {
        names.iter().map(|n| TeamName::new(*n)).collect()
    }

    #[test]
    fn empty_table_is_a_full_tie() {
        let ts = teams(&[
            "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n", "o", "p", "q",
            "r", "s", "t",
        ]);
        let table = LeagueTable::build(&ts, std::iter::empty());
        for t in &ts {
            assert_eq!(table.rank(t).unwrap(), 10.5);
        }
    }

    #[test]
    fn unique_best_goal_difference_ranks_first() {
        let ts = teams(&["a", "b", "c"]);
        let results = [
            (&ts[0], 10u32, 0u32),
            (&ts[1], 2, 2),
            (&ts[2], 0, 5),
        ];
        let table = LeagueTable::build(&ts, results);
        assert_eq!(table.rank(&ts[0]).unwrap(), 1.0);
        assert_eq!(table.rank(&ts[1]).unwrap(), 2.0);
        assert_eq!(table.rank(&ts[2]).unwrap(), 3.0);
    }

    #[test]
    fn tied_pair_shares_average_rank() {
        // GDs (+2, +2, -4) with equal goals scored for the tied pair
        let ts = teams(&["a", "b", "c"]);
        let results = [
            (&ts[0], 3u32, 1u32),
            (&ts[1], 3, 1),
            (&ts[2], 1, 5),
        ];
        let table = LeagueTable::build(&ts, results);
        assert_eq!(table.rank(&ts[0]).unwrap(), 1.5);
        assert_eq!(table.rank(&ts[1]).unwrap(), 1.5);
        assert_eq!(table.rank(&ts[2]).unwrap(), 3.0);
    }

    #[test]
    fn goals_scored_breaks_goal_difference_ties() {
        let ts = teams(&["a", "b"]);
        let results = [(&ts[0], 5u32, 5u32), (&ts[1], 2, 2)];
        let table = LeagueTable::build(&ts, results);
        assert_eq!(table.rank(&ts[0]).unwrap(), 1.0);
        assert_eq!(table.rank(&ts[1]).unwrap(), 2.0);
    }

    #[test]
    fn unknown_team_is_an_error() {
        let ts = teams(&["a"]);
        let table = LeagueTable::build(&ts, std::iter::empty());
        assert!(table.rank(&TeamName::new("z")).is_err());
    }
}

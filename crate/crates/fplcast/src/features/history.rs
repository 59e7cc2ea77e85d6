//! Frozen-history index: per-player and per-team match histories ordered
//! most-recent-first, with league ranks at match time.
//!
//! Every lookup takes an explicit cutoff instant and returns only material
//! strictly before it, so feature building can never see the target fixture
//! or anything later.

use chrono::{DateTime, Utc};
use std::collections::{BTreeMap, HashMap};

use super::league::LeagueTable;
use crate::error::{Error, Result};
use crate::types::{
    Availability, PlayerId, PlayerMatchRecord, Position, Season, TeamMatchStats, TeamName,
};

/// One team's view of one played match, as feature source material.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamMatchFact {
    pub season: Season,
    pub gameweek: u8,
    pub kickoff: DateTime<Utc>,
    pub team: TeamName,
    pub opponent: TeamName,
    pub was_home: bool,
    pub stats: TeamMatchStats,
    /// League rank of `team` immediately before this match.
    pub rank_before: f64,
    /// League rank of `opponent` immediately before this match.
    pub opp_rank_before: f64,
}

/// The fixture a feature row is built for.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetFixture {
    pub season: Season,
    pub gameweek: u8,
    pub kickoff: DateTime<Utc>,
    pub team: TeamName,
    pub opponent: TeamName,
    pub home: bool,
}

/// Current pre-match state of the player and clubs.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchStatus {
    pub availability: Availability,
    pub home: bool,
    pub team_rank: f64,
    pub opponent_rank: f64,
}

/// Inputs for one feature row: histories strictly before the cutoff plus
/// current match status.
#[derive(Debug)]
pub struct RowContext<'a> {
    pub player_history: Vec<&'a PlayerMatchRecord>,
    pub team_history: Vec<&'a TeamMatchFact>,
    pub opponent_history: Vec<&'a TeamMatchFact>,
    pub status: MatchStatus,
}

#[derive(Debug, Default)]
pub struct HistoryIndex {
    by_player: BTreeMap<PlayerId, Vec<PlayerMatchRecord>>,
    by_team: BTreeMap<TeamName, Vec<TeamMatchFact>>,
    /// Team universe per season, from the fixture list (known pre-season).
    season_teams: BTreeMap<Season, Vec<TeamName>>,
    /// (gameweek, kickoff, team, scored, conceded) per season, for tables.
    season_results: BTreeMap<Season, Vec<(u8, DateTime<Utc>, TeamName, u32, u32)>>,
}

impl HistoryIndex {
    /// Build from joined records plus the fixture lists of every season the
    /// records span. Fixtures supply the team universe; results come from
    /// the records themselves.
    pub fn build(records: &[PlayerMatchRecord], fixtures: &[crate::types::Fixture]) -> HistoryIndex {
        let mut season_teams: BTreeMap<Season, Vec<TeamName>> = BTreeMap::new();
        for f in fixtures {
            let teams = season_teams.entry(f.season.clone()).or_default();
            for t in [&f.home_team, &f.away_team] {
                if !teams.contains(t) {
                    teams.push(t.clone());
                }
            }
        }
        for teams in season_teams.values_mut() {
            teams.sort();
        }

        let mut by_player: BTreeMap<PlayerId, Vec<PlayerMatchRecord>> = BTreeMap::new();
        for r in records {
            by_player
                .entry(r.player_id().clone())
                .or_default()
                .push(r.clone());
        }
        for history in by_player.values_mut() {
            history.sort_by(|a, b| {
                b.kickoff
                    .cmp(&a.kickoff)
                    .then(b.gameweek().cmp(&a.gameweek()))
                    .then(a.opponent().cmp(b.opponent()))
            });
        }

        // one fact per (team, kickoff, opponent); every player row of that
        // side carries the same team-level stats
        let mut seen: BTreeMap<(TeamName, DateTime<Utc>, TeamName), (u8, Season, bool, TeamMatchStats)> =
            BTreeMap::new();
        for r in records {
            seen.entry((r.team().clone(), r.kickoff, r.opponent().clone()))
                .or_insert((r.gameweek(), r.season().to_string(), r.fpl.was_home, r.team_match));
        }

        let mut season_results: BTreeMap<Season, Vec<(u8, DateTime<Utc>, TeamName, u32, u32)>> =
            BTreeMap::new();
        for ((team, kickoff, _opp), (gw, season, _home, stats)) in &seen {
            season_results.entry(season.clone()).or_default().push((
                *gw,
                *kickoff,
                team.clone(),
                stats.goals_scored as u32,
                stats.goals_conceded as u32,
            ));
        }

        let mut index = HistoryIndex {
            by_player,
            by_team: BTreeMap::new(),
            season_teams,
            season_results,
        };

        // ranks at match time, memoized per (season, gameweek, kickoff)
        let mut table_cache: HashMap<(Season, u8, DateTime<Utc>), LeagueTable> = HashMap::new();
        let mut by_team: BTreeMap<TeamName, Vec<TeamMatchFact>> = BTreeMap::new();
        for ((team, kickoff, opp), (gw, season, home, stats)) in &seen {
            let key = (season.clone(), *gw, *kickoff);
            let table = table_cache
                .entry(key)
                .or_insert_with(|| index.league_table(season, *gw, *kickoff));
            let rank_before = table.rank(team).unwrap_or(0.0);
            let opp_rank_before = table.rank(opp).unwrap_or(0.0);
            by_team.entry(team.clone()).or_default().push(TeamMatchFact {
                season: season.clone(),
                gameweek: *gw,
                kickoff: *kickoff,
                team: team.clone(),
                opponent: opp.clone(),
                was_home: *home,
                stats: *stats,
                rank_before,
                opp_rank_before,
            });
        }
        for facts in by_team.values_mut() {
            facts.sort_by(|a, b| b.kickoff.cmp(&a.kickoff).then(b.gameweek.cmp(&a.gameweek)));
        }
        index.by_team = by_team;
        index
    }

    pub fn players(&self) -> impl Iterator<Item = &PlayerId> {
        self.by_player.keys()
    }

    pub fn teams(&self) -> impl Iterator<Item = &TeamName> {
        self.by_team.keys()
    }

    pub fn season_teams(&self, season: &str) -> &[TeamName] {
        self.season_teams
            .get(season)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Player's past matches strictly before `cutoff`, most recent first.
    pub fn player_history(&self, player: &PlayerId, cutoff: DateTime<Utc>) -> Vec<&PlayerMatchRecord> {
        self.by_player
            .get(player)
            .map(|h| h.iter().filter(|r| r.kickoff < cutoff).collect())
            .unwrap_or_default()
    }

    /// Most recent position of the player on record before `cutoff`.
    pub fn player_position(&self, player: &PlayerId, cutoff: DateTime<Utc>) -> Option<Position> {
        self.player_history(player, cutoff)
            .first()
            .map(|r| r.fpl.position)
    }

    /// Team's past matches strictly before `cutoff`, most recent first.
    pub fn team_history(&self, team: &TeamName, cutoff: DateTime<Utc>) -> Vec<&TeamMatchFact> {
        self.by_team
            .get(team)
            .map(|h| h.iter().filter(|f| f.kickoff < cutoff).collect())
            .unwrap_or_default()
    }

    /// Standings before `gameweek`, from matches of earlier gameweeks
    /// completed strictly before `cutoff`.
    pub fn league_table(&self, season: &str, gameweek: u8, cutoff: DateTime<Utc>) -> LeagueTable {
        let teams = self.season_teams(season);
        let results = self
            .season_results
            .get(season)
            .into_iter()
            .flatten()
            .filter(|(gw, kickoff, _, _, _)| *gw < gameweek && *kickoff < cutoff)
            .map(|(_, _, team, gf, ga)| (team, *gf, *ga));
        LeagueTable::build(teams, results)
    }

    /// Assemble the feature inputs for a target fixture with history frozen
    /// at `cutoff` (the fixture kickoff for training rows, the forecast
    /// deadline for inference).
    pub fn context_for(
        &self,
        player: &PlayerId,
        target: &TargetFixture,
        cutoff: DateTime<Utc>,
        availability: Availability,
    ) -> Result<RowContext<'_>> {
        let table = self.league_table(&target.season, target.gameweek, cutoff);
        let team_rank = table.rank(&target.team).map_err(|_| Error::UnknownTeam(
            format!("{} not in {} fixtures", target.team, target.season),
        ))?;
        let opponent_rank = table.rank(&target.opponent).map_err(|_| Error::UnknownTeam(
            format!("{} not in {} fixtures", target.opponent, target.season),
        ))?;
        Ok(RowContext {
            player_history: self.player_history(player, cutoff),
            team_history: self.team_history(&target.team, cutoff),
            opponent_history: self.team_history(&target.opponent, cutoff),
            status: MatchStatus {
                availability,
                home: target.home,
                team_rank,
                opponent_rank,
            },
        })
    }
}

/// Mean of up to `horizon` most recent values (history ordered most recent
/// first); the mean of whatever is available when shorter, 0.0 when empty.
pub fn rolling_mean(history: &[f64], horizon: usize) -> f64 {
    if history.is_empty() {
        return 0.0;
    }
    let n = horizon.min(history.len());
    history[..n].iter().sum::<f64>() / n as f64
}

/// FPL points from past matches played at the venue of the upcoming match,
/// in recency order.
pub fn relevant_points_history(history: &[&PlayerMatchRecord], upcoming_home: bool) -> Vec<f64> {
    history
        .iter()
        .filter(|r| r.fpl.was_home == upcoming_home)
        .map(|r| f64::from(r.fpl.total_points))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rolling_mean_examples() {
        assert!((rolling_mean(&[2.0, 5.0, 1.0], 3) - 8.0 / 3.0).abs() < 1e-12);
        assert_eq!(rolling_mean(&[7.0], 5), 7.0);
        assert_eq!(rolling_mean(&[], 38), 0.0);
        // horizon one is the raw most recent value
        assert_eq!(rolling_mean(&[4.0, 9.0], 1), 4.0);
    }
}

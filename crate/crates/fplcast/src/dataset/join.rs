//! Join FPL player-gameweek rows with Understat player and team facts.

use chrono::NaiveDate;
use std::collections::BTreeMap;

use super::aliases::AliasTable;
use crate::error::{Error, Result};
use crate::types::{
    Fixture, PlayerMatchRecord, RawSeason, RawUnderstatPlayerMatch, RawUnderstatTeamMatch,
    TeamMatchStats, UnderstatPlayerStats,
};

/// Join result plus the coverage report for entities that could not be
/// matched (reported, never dropped).
#[derive(Debug, Clone, Default)]
pub struct JoinOutcome {
    pub records: Vec<PlayerMatchRecord>,
    /// (season, player_id, gameweek) of played rows without Understat data.
    pub unmatched_players: Vec<(String, String, u8)>,
}

fn date_lookup<'a, T>(
    map: &'a BTreeMap<(String, NaiveDate), T>,
    key: &str,
    date: NaiveDate,
) -> Option<&'a T> {
    for cand in [
        date,
        date.pred_opt().unwrap_or(date),
        date.succ_opt().unwrap_or(date),
    ] {
        if let Some(v) = map.get(&(key.to_string(), cand)) {
            return Some(v);
        }
    }
    None
}

/// Join one season of raw data. Every FPL row yields exactly one record;
/// team and opponent Understat facts must resolve for played fixtures,
/// player-level facts stay empty when unmatched (pending imputation).
pub fn join_sources(raw: &RawSeason, aliases: &AliasTable) -> Result<JoinOutcome> {
    let mut fixtures_by_sides: BTreeMap<(u8, String, String), &Fixture> = BTreeMap::new();
    for f in &raw.fixtures {
        let key = (
            f.gameweek,
            f.home_team.to_string(),
            f.away_team.to_string(),
        );
        if fixtures_by_sides.insert(key, f).is_some() {
            return Err(Error::DuplicateKey(format!(
                "fixture {} {} vs {} gameweek {}",
                f.season, f.home_team, f.away_team, f.gameweek
            )));
        }
    }

    let mut team_matches: BTreeMap<(String, NaiveDate), &RawUnderstatTeamMatch> = BTreeMap::new();
    for tm in &raw.understat_teams {
        team_matches.insert((tm.team_key.clone(), tm.match_date), tm);
    }
    let mut player_matches: BTreeMap<(String, NaiveDate), &RawUnderstatPlayerMatch> =
        BTreeMap::new();
    for pm in &raw.understat_players {
        player_matches.insert((pm.player_key.clone(), pm.match_date), pm);
    }

    let mut outcome = JoinOutcome::default();
    let mut seen_keys: BTreeMap<String, ()> = BTreeMap::new();

    for row in &raw.fpl_rows {
        let (home, away) = if row.was_home {
            (row.team.clone(), row.opponent_team.clone())
        } else {
            (row.opponent_team.clone(), row.team.clone())
        };
        let fixture = fixtures_by_sides
            .get(&(row.gameweek, home.to_string(), away.to_string()))
            .ok_or_else(|| Error::MissingFixture {
                season: row.season.clone(),
                gameweek: row.gameweek,
                team: row.team.to_string(),
                opponent: row.opponent_team.to_string(),
            })?;
        let match_date = fixture.kickoff.date_naive();

        let team_key = aliases
            .team_key(&row.season, &row.team)
            .ok_or_else(|| Error::MissingTeamAlias {
                team: row.team.to_string(),
                season: row.season.clone(),
            })?;
        let opp_key = aliases
            .team_key(&row.season, &row.opponent_team)
            .ok_or_else(|| Error::MissingTeamAlias {
                team: row.opponent_team.to_string(),
                season: row.season.clone(),
            })?;

        let team_match = date_lookup(&team_matches, team_key, match_date).ok_or_else(|| {
            Error::MissingTeamMatch {
                team: row.team.to_string(),
                date: match_date.to_string(),
            }
        })?;
        let opponent_match = date_lookup(&team_matches, opp_key, match_date).ok_or_else(|| {
            Error::MissingTeamMatch {
                team: row.opponent_team.to_string(),
                date: match_date.to_string(),
            }
        })?;

        let understat_player = aliases
            .player_key(&row.season, &row.player_id)
            .and_then(|key| date_lookup(&player_matches, key, match_date))
            .map(|pm| UnderstatPlayerStats::from_raw(pm));

        if understat_player.is_none() && row.minutes > 0 {
            outcome.unmatched_players.push((
                row.season.clone(),
                row.player_id.to_string(),
                row.gameweek,
            ));
        }

        let record = PlayerMatchRecord {
            fpl: row.clone(),
            kickoff: fixture.kickoff,
            understat_player,
            team_match: TeamMatchStats::from_raw(team_match),
            opponent_match: TeamMatchStats::from_raw(opponent_match),
            imputed: false,
        };
        let key = record.join_key();
        if seen_keys.insert(key.clone(), ()).is_some() {
            return Err(Error::DuplicateKey(key));
        }
        outcome.records.push(record);
    }

    Ok(outcome)
}

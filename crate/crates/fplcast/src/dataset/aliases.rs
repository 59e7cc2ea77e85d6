//! Curated entity linking between FPL and Understat, keyed by season.
//!
//! The two sources share no common id, so the mapping is an explicit file;
//! unmatched players are reported by the join, never silently dropped.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{PlayerId, Season, TeamName};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AliasTable {
    teams: BTreeMap<(Season, TeamName), String>,
    players: BTreeMap<(Season, PlayerId), String>,
}

impl AliasTable {
    pub fn new() -> AliasTable {
        AliasTable::default()
    }

    pub fn add_team(&mut self, season: &str, team: TeamName, understat_key: impl Into<String>) {
        self.teams
            .insert((season.to_string(), team), understat_key.into());
    }

    pub fn add_player(&mut self, season: &str, player: PlayerId, understat_key: impl Into<String>) {
        self.players
            .insert((season.to_string(), player), understat_key.into());
    }

    pub fn team_key(&self, season: &str, team: &TeamName) -> Option<&str> {
        self.teams
            .get(&(season.to_string(), team.clone()))
            .map(String::as_str)
    }

    pub fn player_key(&self, season: &str, player: &PlayerId) -> Option<&str> {
        self.players
            .get(&(season.to_string(), player.clone()))
            .map(String::as_str)
    }

    /// Load from CSV with columns kind,season,fpl_id,understat_key where
    /// kind is `team` or `player`.
    pub fn from_csv(path: &Path) -> Result<AliasTable> {
        let mut rdr = csv::Reader::from_path(path)
            .map_err(|e| Error::Other(format!("alias table {}: {e}", path.display())))?;
        let mut table = AliasTable::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row.map_err(|e| Error::Parse {
                file: path.display().to_string(),
                row: i + 2,
                column: "-".into(),
                message: e.to_string(),
            })?;
            if row.len() < 4 {
                return Err(Error::Parse {
                    file: path.display().to_string(),
                    row: i + 2,
                    column: "-".into(),
                    message: "expected kind,season,fpl_id,understat_key".into(),
                });
            }
            match row[0].trim() {
                "team" => table.add_team(
                    row[1].trim(),
                    TeamName::new(row[2].trim()),
                    row[3].trim(),
                ),
                "player" => table.add_player(
                    row[1].trim(),
                    PlayerId::new(row[2].trim()),
                    row[3].trim(),
                ),
                other => {
                    return Err(Error::Parse {
                        file: path.display().to_string(),
                        row: i + 2,
                        column: "kind".into(),
                        message: format!("unknown kind {other}"),
                    })
                }
            }
        }
        Ok(table)
    }

    /// Write the table back out in the same CSV format.
    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut wtr = csv::Writer::from_path(path)
            .map_err(|e| Error::Other(format!("alias table {}: {e}", path.display())))?;
        wtr.write_record(["kind", "season", "fpl_id", "understat_key"])
            .map_err(|e| Error::Other(format!("csv write: {e}")))?;
        for ((season, team), key) in &self.teams {
            wtr.write_record(["team", season, team.as_str(), key])
                .map_err(|e| Error::Other(format!("csv write: {e}")))?;
        }
        for ((season, player), key) in &self.players {
            wtr.write_record(["player", season, player.as_str(), key])
                .map_err(|e| Error::Other(format!("csv write: {e}")))?;
        }
        wtr.flush()
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Ok(())
    }
}

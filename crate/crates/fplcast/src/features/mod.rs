//! Feature engineering: multi-horizon historical means per position schema
//! plus current match status, with min-max normalization.

pub mod history;
pub mod league;
pub mod scaler;
pub mod schema;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

pub use history::{
    relevant_points_history, rolling_mean, HistoryIndex, MatchStatus, RowContext, TargetFixture,
    TeamMatchFact,
};
pub use league::LeagueTable;
pub use scaler::ScalerParams;
pub use schema::{schema_for, PositionSchema, HORIZONS};

use crate::error::{Error, Result};
use crate::types::{PlayerId, PlayerMatchRecord, Position, Season, TeamName, UnderstatPlayerStats};
use schema::{PlayerFeat, StatusFeat, TeamFeat};

/// Identity of the sample a feature row describes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowMeta {
    pub player_id: PlayerId,
    pub player_name: String,
    pub position: Position,
    pub season: Season,
    pub gameweek: u8,
    pub team: TeamName,
    pub opponent: TeamName,
    pub was_home: bool,
    pub kickoff: DateTime<Utc>,
}

/// A fixed-width numeric vector for one position schema. Values are raw
/// after building; [`apply_scaler`] produces the normalized form and fills
/// `target_norm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub schema_version: String,
    pub values: Vec<f64>,
    pub target_raw: Option<i32>,
    pub target_norm: Option<f64>,
    pub meta: RowMeta,
}

fn player_value(feat: PlayerFeat, r: &PlayerMatchRecord) -> f64 {
    let us = r.understat_player.as_ref().unwrap_or(&UnderstatPlayerStats::ZERO);
    match feat {
        PlayerFeat::FplPoints => f64::from(r.fpl.total_points),
        PlayerFeat::RelevantFplPoints => unreachable!("venue-filtered separately"),
        PlayerFeat::Minutes => f64::from(r.fpl.minutes),
        PlayerFeat::Influence => r.fpl.influence,
        PlayerFeat::Creativity => r.fpl.creativity,
        PlayerFeat::Threat => r.fpl.threat,
        PlayerFeat::GoalsScored => f64::from(r.fpl.goals_scored),
        PlayerFeat::PenaltiesMissed => f64::from(r.fpl.penalties_missed),
        PlayerFeat::Assists => f64::from(r.fpl.assists),
        PlayerFeat::GoalsConceded => f64::from(r.fpl.goals_conceded),
        PlayerFeat::OwnGoals => f64::from(r.fpl.own_goals),
        PlayerFeat::Saves => f64::from(r.fpl.saves),
        PlayerFeat::PenaltiesSaved => f64::from(r.fpl.penalties_saved),
        PlayerFeat::YellowCards => f64::from(r.fpl.yellow_cards),
        PlayerFeat::RedCards => f64::from(r.fpl.red_cards),
        PlayerFeat::Bps => f64::from(r.fpl.bps),
        PlayerFeat::Bonus => f64::from(r.fpl.bonus),
        PlayerFeat::Shots => us.shots,
        PlayerFeat::Xg => us.xg,
        PlayerFeat::XgChain => us.xg_chain,
        PlayerFeat::XgBuildup => us.xg_buildup,
        PlayerFeat::KeyPasses => us.key_passes,
        PlayerFeat::Xa => us.xa,
    }
}

fn team_value(feat: TeamFeat, f: &TeamMatchFact) -> f64 {
    match feat {
        TeamFeat::GoalsScored => f.stats.goals_scored,
        TeamFeat::GoalsConceded => f.stats.goals_conceded,
        TeamFeat::LeagueRank => f.rank_before,
        TeamFeat::OpponentLeagueRank => f.opp_rank_before,
        TeamFeat::Xg => f.stats.xg,
        TeamFeat::DeepAllowed => f.stats.deep_allowed,
        TeamFeat::PpdaAllowedAtt => f.stats.ppda_allowed_att,
        TeamFeat::PpdaAllowedDef => f.stats.ppda_allowed_def,
        TeamFeat::Xga => f.stats.xga,
        TeamFeat::Deep => f.stats.deep,
        TeamFeat::PpdaAtt => f.stats.ppda_att,
        TeamFeat::PpdaDef => f.stats.ppda_def,
    }
}

/// Build the raw (unnormalized) feature vector for one target fixture.
pub fn build_feature_values(ctx: &RowContext<'_>, schema: &PositionSchema) -> Vec<f64> {
    let mut values = Vec::with_capacity(schema.expected_count());

    let venue_points = relevant_points_history(&ctx.player_history, ctx.status.home);
    let player_series: Vec<Vec<f64>> = schema
        .player_feats
        .iter()
        .map(|&feat| match feat {
            PlayerFeat::RelevantFplPoints => venue_points.clone(),
            _ => ctx
                .player_history
                .iter()
                .map(|r| player_value(feat, r))
                .collect(),
        })
        .collect();
    let team_series: Vec<Vec<f64>> = schema
        .team_feats
        .iter()
        .map(|&feat| ctx.team_history.iter().map(|f| team_value(feat, f)).collect())
        .collect();
    let opp_series: Vec<Vec<f64>> = schema
        .opponent_feats
        .iter()
        .map(|&feat| {
            ctx.opponent_history
                .iter()
                .map(|f| team_value(feat, f))
                .collect()
        })
        .collect();

    for h in HORIZONS {
        for series in &player_series {
            values.push(rolling_mean(series, h));
        }
        for series in &team_series {
            values.push(rolling_mean(series, h));
        }
        for series in &opp_series {
            values.push(rolling_mean(series, h));
        }
    }
    for feat in &schema.status_feats {
        values.push(match feat {
            StatusFeat::Availability => ctx.status.availability.fraction(),
            StatusFeat::TeamLeagueRank => ctx.status.team_rank,
            StatusFeat::OpponentLeagueRank => ctx.status.opponent_rank,
        });
    }
    values
}

/// Build a full feature row for a fixture; `target_raw` is present for
/// training samples and absent at inference.
pub fn build_feature_row(
    ctx: &RowContext<'_>,
    schema: &PositionSchema,
    meta: RowMeta,
    target_raw: Option<i32>,
) -> Result<FeatureRow> {
    if meta.position != schema.position {
        return Err(Error::SchemaMismatch {
            expected: schema.position.code().to_string(),
            got: meta.position.code().to_string(),
        });
    }
    let values = build_feature_values(ctx, schema);
    debug_assert_eq!(values.len(), schema.expected_count());
    Ok(FeatureRow {
        schema_version: schema.version.clone(),
        values,
        target_raw,
        target_norm: None,
        meta,
    })
}

/// Build the training row for one joined record: history is frozen at the
/// record's own kickoff and the realized points become the target.
pub fn build_training_row(index: &HistoryIndex, record: &PlayerMatchRecord) -> Result<FeatureRow> {
    let schema = schema_for(record.fpl.position);
    let target = TargetFixture {
        season: record.season().to_string(),
        gameweek: record.gameweek(),
        kickoff: record.kickoff,
        team: record.team().clone(),
        opponent: record.opponent().clone(),
        home: record.fpl.was_home,
    };
    let ctx = index.context_for(
        record.player_id(),
        &target,
        record.kickoff,
        record.fpl.availability,
    )?;
    build_feature_row(
        &ctx,
        schema,
        RowMeta {
            player_id: record.player_id().clone(),
            player_name: record.fpl.player_name.clone(),
            position: record.fpl.position,
            season: record.season().to_string(),
            gameweek: record.gameweek(),
            team: record.team().clone(),
            opponent: record.opponent().clone(),
            was_home: record.fpl.was_home,
            kickoff: record.kickoff,
        },
        Some(record.fpl.total_points),
    )
}

/// Fit min-max scalers on training rows (features and raw targets).
pub fn fit_scaler(rows: &[FeatureRow]) -> Result<ScalerParams> {
    let values: Vec<Vec<f64>> = rows.iter().map(|r| r.values.clone()).collect();
    let targets: Vec<f64> = rows
        .iter()
        .map(|r| {
            r.target_raw
                .map(f64::from)
                .ok_or_else(|| Error::InvalidInput("scaler fit over rows without targets".into()))
        })
        .collect::<Result<_>>()?;
    ScalerParams::fit(&values, &targets)
}

/// Normalize a row with fitted scalers, filling `target_norm` when the raw
/// target is present.
pub fn apply_scaler(row: &FeatureRow, params: &ScalerParams) -> Result<FeatureRow> {
    let values = params.normalize_features(&row.values)?;
    let target_norm = row.target_raw.map(|t| params.normalize_target(f64::from(t)));
    Ok(FeatureRow {
        schema_version: row.schema_version.clone(),
        values,
        target_raw: row.target_raw,
        target_norm,
        meta: row.meta.clone(),
    })
}

/// Columnar export: one comment line embedding the schema version, then a
/// CSV table of meta columns, features, and optional weight column.
pub fn export_matrix(
    path: &Path,
    schema: &PositionSchema,
    rows: &[FeatureRow],
    weights: Option<&[f64]>,
) -> Result<()> {
    let mut file = std::fs::File::create(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    writeln!(file, "# schema_version={}", schema.version)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut wtr = csv::Writer::from_writer(file);

    let mut header = vec![
        "player_id".to_string(),
        "player_name".to_string(),
        "position".to_string(),
        "season".to_string(),
        "gameweek".to_string(),
        "team".to_string(),
        "opponent".to_string(),
        "was_home".to_string(),
        "target_raw".to_string(),
    ];
    header.extend(schema.feature_names.iter().cloned());
    if weights.is_some() {
        header.push("weight".to_string());
    }
    wtr.write_record(&header)
        .map_err(|e| Error::Other(format!("csv write: {e}")))?;

    for (i, row) in rows.iter().enumerate() {
        let mut record = vec![
            row.meta.player_id.to_string(),
            row.meta.player_name.clone(),
            row.meta.position.code().to_string(),
            row.meta.season.clone(),
            row.meta.gameweek.to_string(),
            row.meta.team.to_string(),
            row.meta.opponent.to_string(),
            row.meta.was_home.to_string(),
            row.target_raw.map(|t| t.to_string()).unwrap_or_default(),
        ];
        record.extend(row.values.iter().map(|v| format!("{v:?}")));
        if let Some(w) = weights {
            record.push(format!("{:?}", w[i]));
        }
        wtr.write_record(&record)
            .map_err(|e| Error::Other(format!("csv write: {e}")))?;
    }
    wtr.flush().map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

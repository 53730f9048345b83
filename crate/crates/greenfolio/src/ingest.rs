//! CSV readers and writers for asset prices and the factor series.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use greenfolio_core::data::{AssetRecord, CapClass, IntensitySeries, LossSeries, MarketSeries, Year};

use crate::error::{Error, Result};

pub const ASSET_HEADER: &str = "ticker,name,cap_class,env_score,year,close";
pub const ASSET_HEADER_WITH_SECTOR: &str = "ticker,name,cap_class,env_score,year,close,sector";
pub const LOSS_HEADER: &str = "year,damage_usd_bn";
pub const INTENSITY_HEADER: &str = "year,tco2_per_kusd";
pub const MARKET_HEADER: &str = "year,index_level";

fn open(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|source| Error::Read { path: path.into(), source })?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn header_line(reader: &mut csv::Reader<File>, path: &Path) -> Result<String> {
    let headers = reader.headers().map_err(|e| Error::Parse { path: path.into(), row: 1, message: e.to_string() })?;
    Ok(headers.iter().collect::<Vec<_>>().join(","))
}

struct Row<'a> {
    path: &'a Path,
    line: u64,
    record: csv::StringRecord,
}

impl Row<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse { path: self.path.into(), row: self.line, message: message.into() }
    }

    fn text(&self, i: usize, name: &str) -> Result<&str> {
        match self.record.get(i) {
            Some(s) if !s.is_empty() => Ok(s),
            _ => Err(self.error(format!("missing {name}"))),
        }
    }

    fn number(&self, i: usize, name: &str) -> Result<f64> {
        let s = self.text(i, name)?;
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.error(format!("{name} `{s}` is not a finite number"))),
        }
    }

    fn year(&self, i: usize) -> Result<Year> {
        let s = self.text(i, "year")?;
        s.parse().map_err(|_| self.error(format!("year `{s}` is not an integer")))
    }
}

fn rows<'a>(
    reader: &'a mut csv::Reader<File>,
    path: &'a Path,
    width: usize,
) -> impl Iterator<Item = Result<Row<'a>>> + 'a {
    reader.records().map(move |r| {
        let record = r.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line());
            Error::Parse { path: path.into(), row, message: e.to_string() }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(Error::Parse {
                path: path.into(),
                row: line,
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        Ok(Row { path, line, record })
    })
}

struct Pending {
    first_line: u64,
    name: String,
    cap_class: CapClass,
    env_score: f64,
    sector: Option<String>,
    prices: Vec<(Year, f64)>,
}

/// Reads a long-format asset file: one row per ticker and year.
///
/// Rows for a ticker must agree on name, cap class, score and sector; a
/// disagreement or a repeated `(ticker, year)` pair is a duplicate ticker.
/// Assets are returned in order of first appearance.
pub fn load_assets(path: &Path) -> Result<Vec<AssetRecord>> {
    let mut reader = open(path)?;
    let header = header_line(&mut reader, path)?;
    let with_sector = match header.as_str() {
        ASSET_HEADER => false,
        ASSET_HEADER_WITH_SECTOR => true,
        _ => return Err(Error::Header { path: path.into(), expected: ASSET_HEADER, found: header }),
    };
    let width = if with_sector { 7 } else { 6 };

    let mut order: Vec<String> = Vec::new();
    let mut pending: BTreeMap<String, Pending> = BTreeMap::new();
    for row in rows(&mut reader, path, width) {
        let row = row?;
        let ticker = row.text(0, "ticker")?.to_string();
        let name = row.text(1, "name")?.to_string();
        let cap_class: CapClass = row.text(2, "cap_class")?.parse().map_err(|e| row.error(format!("{e}")))?;
        let env_score = row.number(3, "env_score")?;
        let year = row.year(4)?;
        let close = row.number(5, "close")?;
        let sector = if with_sector { row.record.get(6).filter(|s| !s.is_empty()).map(str::to_string) } else { None };

        match pending.get_mut(&ticker) {
            Some(p) => {
                let same = p.name == name && p.cap_class == cap_class && p.env_score == env_score && p.sector == sector;
                if !same || p.prices.iter().any(|(y, _)| *y == year) {
                    return Err(Error::Invalid {
                        path: path.into(),
                        source: greenfolio_core::Error::DuplicateTicker(ticker),
                    });
                }
                p.prices.push((year, close));
            }
            None => {
                order.push(ticker.clone());
                pending.insert(
                    ticker,
                    Pending { first_line: row.line, name, cap_class, env_score, sector, prices: vec![(year, close)] },
                );
            }
        }
    }

    order
        .into_iter()
        .map(|ticker| {
            let p = pending.remove(&ticker).expect("recorded on first sight");
            // value errors keep the row pointer of the asset's first line
            let asset =
                AssetRecord::new(ticker, p.name, p.cap_class, p.env_score, p.prices).map_err(
                    |source| match source {
                        greenfolio_core::Error::OutOfRange { .. } => {
                            Error::Parse { path: path.into(), row: p.first_line, message: source.to_string() }
                        }
                        source => Error::Invalid { path: path.into(), source },
                    },
                )?;
            Ok(match p.sector {
                Some(s) => asset.with_sector(s),
                None => asset,
            })
        })
        .collect()
}

/// Writes assets in the long format read by [`load_assets`].
pub fn write_assets(path: &Path, assets: &[AssetRecord]) -> Result<()> {
    let with_sector = assets.iter().any(|a| a.sector().is_some());
    let mut out = String::new();
    out.push_str(if with_sector { ASSET_HEADER_WITH_SECTOR } else { ASSET_HEADER });
    out.push('\n');
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for a in assets {
        for (year, close) in a.prices() {
            let mut fields = vec![
                a.ticker().to_string(),
                a.name().to_string(),
                a.cap_class().as_str().to_string(),
                a.env_score().to_string(),
                year.to_string(),
                close.to_string(),
            ];
            if with_sector {
                fields.push(a.sector().unwrap_or_default().to_string());
            }
            writer.write_record(&fields).map_err(|e| write_error(path, e.into()))?;
        }
    }
    let body = writer.into_inner().map_err(|e| write_error(path, std::io::Error::other(e.to_string())))?;
    out.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
    std::fs::write(path, out).map_err(|e| write_error(path, e))
}

fn write_error(path: &Path, source: std::io::Error) -> Error {
    Error::Write { path: path.into(), source }
}

fn load_year_values(path: &Path, expected: &'static str) -> Result<Vec<(Year, f64)>> {
    let mut reader = open(path)?;
    let header = header_line(&mut reader, path)?;
    if header != expected {
        return Err(Error::Header { path: path.into(), expected, found: header });
    }
    let column = &expected[expected.find(',').expect("two columns") + 1..];
    let mut out = Vec::new();
    for row in rows(&mut reader, path, 2) {
        let row = row?;
        out.push((row.year(0)?, row.number(1, column)?));
    }
    Ok(out)
}

/// `year,damage_usd_bn`
pub fn load_losses(path: &Path) -> Result<LossSeries> {
    let entries = load_year_values(path, LOSS_HEADER)?;
    LossSeries::new(entries).map_err(|source| Error::Invalid { path: path.into(), source })
}

/// `year,tco2_per_kusd`
pub fn load_intensity(path: &Path) -> Result<IntensitySeries> {
    let entries = load_year_values(path, INTENSITY_HEADER)?;
    IntensitySeries::new(entries).map_err(|source| Error::Invalid { path: path.into(), source })
}

/// `year,index_level`
pub fn load_market(path: &Path) -> Result<MarketSeries> {
    let entries = load_year_values(path, MARKET_HEADER)?;
    MarketSeries::new(entries).map_err(|source| Error::Invalid { path: path.into(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn reads_long_format_in_first_seen_order() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "a.csv",
            "ticker,name,cap_class,env_score,year,close\n\
             TCS,Tata,large,60,2001,11\nINFY,Infosys,mid,55.5,2000,5\nTCS,Tata,large,60,2000,10\n",
        );
        let assets = load_assets(&p).unwrap();
        assert_eq!(assets.len(), 2);
        assert_eq!(assets[0].ticker(), "TCS");
        assert_eq!(assets[0].prices().len(), 2);
        assert_eq!(assets[1].cap_class(), CapClass::Mid);
    }

    #[test]
    fn row_errors_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "a.csv",
            "ticker,name,cap_class,env_score,year,close\nA,a,large,50,2000,1\nB,b,large,50,20x1,1\n",
        );
        let err = load_assets(&p).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 3, .. }), "{err}");
        let p = write(&dir, "b.csv", "ticker,name,cap_class,env_score,year,close\nA,a,huge,50,2000,1\n");
        assert!(matches!(load_assets(&p).unwrap_err(), Error::Parse { row: 2, .. }));
    }

    #[test]
    fn conflicting_rows_are_duplicate_tickers() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "a.csv",
            "ticker,name,cap_class,env_score,year,close\nTCS,Tata,large,60,2000,1\nTCS,Other,mid,40,2001,1\n",
        );
        let err = load_assets(&p).unwrap_err();
        assert!(
            matches!(err, Error::Invalid { source: greenfolio_core::Error::DuplicateTicker(ref t), .. } if t == "TCS")
        );
    }

    #[test]
    fn bad_header_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "m.csv", "year,level\n2000,1\n");
        assert!(matches!(load_market(&p).unwrap_err(), Error::Header { .. }));
    }

    #[test]
    fn missing_file() {
        let err = load_losses(Path::new("/nonexistent/losses.csv")).unwrap_err();
        assert!(matches!(err, Error::Read { .. }));
        assert_eq!(err.exit_code(), crate::error::exit::DATA);
    }
}

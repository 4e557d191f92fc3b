use crate::EtchError;

/// Which of the three ring designs a device belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignLabel {
    D1,
    D2,
    D3,
    Other,
}

impl DesignLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            DesignLabel::D1 => "d1",
            DesignLabel::D2 => "d2",
            DesignLabel::D3 => "d3",
            DesignLabel::Other => "other",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "d1" => Some(DesignLabel::D1),
            "d2" => Some(DesignLabel::D2),
            "d3" => Some(DesignLabel::D3),
            "other" | "" => Some(DesignLabel::Other),
            _ => None,
        }
    }
}

/// Per-record quality flag. `PoorVacuum` marks cooldowns with residual
/// gas condensing on the sample, which shrinks the apparent temperature
/// shift; such records are excluded from the temperature offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFlag {
    Ok,
    PoorVacuum,
}

impl RecordFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RecordFlag::Ok => "ok",
            RecordFlag::PoorVacuum => "poor_vacuum",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "" | "ok" => Some(RecordFlag::Ok),
            "poor_vacuum" => Some(RecordFlag::PoorVacuum),
            _ => None,
        }
    }
}

/// One device observed after one etch cycle.
#[derive(Debug, Clone)]
pub struct EtchRecord {
    pub device_id: String,
    pub design: DesignLabel,
    pub cycle: u32,
    /// Cavity-mode energy at room temperature, eV.
    pub e_c_rt_ev: Option<f64>,
    /// Cavity-mode energy in the cryostat, eV.
    pub e_c_lt_ev: Option<f64>,
    pub q: Option<f64>,
    pub flag: RecordFlag,
}

/// A validated collection of etch records, sorted by device then cycle.
/// Every record carries at least one mode energy and no device has two
/// records for the same cycle.
#[derive(Debug, Clone)]
pub struct EtchSeries {
    records: Vec<EtchRecord>,
}

impl EtchSeries {
    pub fn new(mut records: Vec<EtchRecord>) -> Result<Self, EtchError> {
        for r in &records {
            if r.e_c_rt_ev.is_none() && r.e_c_lt_ev.is_none() {
                return Err(EtchError::NoEnergy {
                    device: r.device_id.clone(),
                    cycle: r.cycle,
                });
            }
            for (what, v) in [
                ("E_c_RT", r.e_c_rt_ev),
                ("E_c_LT", r.e_c_lt_ev),
                ("Q", r.q),
            ] {
                if let Some(v) = v {
                    if !v.is_finite() {
                        return Err(EtchError::NonFinite { what });
                    }
                }
            }
        }
        records.sort_by(|a, b| (&a.device_id, a.cycle).cmp(&(&b.device_id, b.cycle)));
        for pair in records.windows(2) {
            if pair[0].device_id == pair[1].device_id && pair[0].cycle == pair[1].cycle {
                return Err(EtchError::DuplicateCycle {
                    device: pair[1].device_id.clone(),
                    cycle: pair[1].cycle,
                });
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[EtchRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

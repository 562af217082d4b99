//! The reduction maps `f(z)`: digit streams built from a source `x` by
//! zeroing (and, for d2, replaying) blocks chosen by `z`.

mod schedule;
mod zseq;

use serde::{Deserialize, Serialize};

pub use schedule::{build_schedule, Blocks, Flavor, Schedule, ScheduleSpec, StepLayout};
pub use zseq::{TailRule, ZClass, ZDomain, ZSequence};

use crate::config::Limits;
use crate::digits::{Base, DigitSource, DigitStream};
use crate::error::{precondition, Result};

/// Everything needed to regenerate a constructed stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub z: ZSequence,
    pub schedule: ScheduleSpec,
    pub x: DigitSource,
}

impl ConstructionSpec {
    pub fn new(z: ZSequence, schedule: ScheduleSpec, x: DigitSource) -> Self {
        Self { z, schedule, x }
    }

    pub fn build_schedule(&self, base: Base, limits: &Limits) -> Result<Schedule> {
        build_schedule(&self.schedule, &self.z, base, limits)
    }

    pub(crate) fn open(&self, base: Base, limits: &Limits) -> Result<DigitStream> {
        if self.x.base != base {
            return precondition(format!(
                "construction in base {base} over a base-{} source",
                self.x.base
            ));
        }
        let schedule = self.build_schedule(base, limits)?;
        if self.schedule.flavor.is_d2() {
            f_d2(&schedule, &self.x, limits)
        } else {
            f_bold(&schedule, &self.x, limits)
        }
    }
}

pub fn classify_z(z: &ZSequence) -> ZClass {
    z.classify()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Action {
    Copy,
    Zero,
    /// Replays x from the given position.
    Replay(u64),
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    start: u64,
    end: u64,
    action: Action,
}

/// `f(z)` for the bold and light flavors: `x` on each `B'_i`, zero on
/// `B_i ∖ B'_i`. Positions before the first block and after the last copy `x`.
pub fn f_bold(schedule: &Schedule, x: &DigitSource, limits: &Limits) -> Result<DigitStream> {
    if schedule.flavor.is_d2() {
        return precondition("f_bold needs a boldfast or light schedule");
    }
    let mut segments = Vec::new();
    for step in &schedule.layout {
        let Blocks::Bold { copy_end, .. } = step.blocks else {
            return precondition("schedule layout does not match its flavor");
        };
        segments.push(Segment {
            start: step.start,
            end: copy_end,
            action: Action::Copy,
        });
        segments.push(Segment {
            start: copy_end,
            end: step.end,
            action: Action::Zero,
        });
    }
    open_segments(schedule.base, segments, x, limits)
}

/// `f(z)` for the d2 flavors: `x` on `B¹_i`, zero on `B²_i`, and on `B³_i` the
/// digits of `x` from position `b^{k_{i−1}}` onward.
pub fn f_d2(schedule: &Schedule, x: &DigitSource, limits: &Limits) -> Result<DigitStream> {
    if !schedule.flavor.is_d2() {
        return precondition("f_d2 needs a d2bold or d2light schedule");
    }
    let mut segments = Vec::new();
    for step in &schedule.layout {
        let Blocks::D2 { b1_end, b2_end, .. } = step.blocks else {
            return precondition("schedule layout does not match its flavor");
        };
        segments.push(Segment {
            start: step.start,
            end: b1_end,
            action: Action::Copy,
        });
        segments.push(Segment {
            start: b1_end,
            end: b2_end,
            action: Action::Zero,
        });
        segments.push(Segment {
            start: b2_end,
            end: step.end,
            action: Action::Replay(step.start),
        });
    }
    open_segments(schedule.base, segments, x, limits)
}

fn open_segments(
    base: Base,
    segments: Vec<Segment>,
    x: &DigitSource,
    limits: &Limits,
) -> Result<DigitStream> {
    if x.base != base {
        return precondition(format!(
            "schedule base {base} differs from source base {}",
            x.base
        ));
    }
    let main = x.open(limits)?;
    let len = main.known_len();
    let cursor = SegmentCursor {
        pos: 0,
        main,
        replay: None,
        segments: segments.into_iter().filter(|s| s.start < s.end).collect(),
        idx: 0,
        x: x.clone(),
        limits: *limits,
    };
    Ok(match len {
        Some(_) => {
            // Finite sources are short; materialize so the length is known.
            let digits: Vec<u8> = cursor.collect();
            DigitStream::finite(base, digits)
        }
        None => DigitStream::unbounded(base, cursor),
    })
}

struct SegmentCursor {
    pos: u64,
    main: DigitStream,
    replay: Option<DigitStream>,
    segments: Vec<Segment>,
    idx: usize,
    x: DigitSource,
    limits: Limits,
}

impl Iterator for SegmentCursor {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        self.pos += 1;
        let xd = self.main.next()?;
        while self.idx < self.segments.len() && self.segments[self.idx].end <= self.pos {
            self.idx += 1;
            self.replay = None;
        }
        let Some(seg) = self.segments.get(self.idx).filter(|s| s.start <= self.pos) else {
            return Some(xd);
        };
        match seg.action {
            Action::Copy => Some(xd),
            Action::Zero => Some(0),
            Action::Replay(from) => {
                if self.replay.is_none() {
                    // Reopening a descriptor that already opened once.
                    let mut s = self.x.open(&self.limits).ok()?;
                    if from > 1 {
                        s.nth((from - 2) as usize)?;
                    }
                    self.replay = Some(s);
                }
                self.replay.as_mut()?.next()
            }
        }
    }
}

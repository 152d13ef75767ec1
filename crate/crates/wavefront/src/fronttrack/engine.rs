use super::{Front, FrontId, Profile};
use crate::error::{Error, Result};
use crate::hypsys::{dot, sub, HyperbolicSystem, RiemannPoint};
use crate::wavecurves::{solve_riemann_with, FanSplit, FrontProto, Scheme, WaveKind};
use crate::Family;
use serde::{Deserialize, Serialize};
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

/// Which interaction rule the engine applies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// Riemann problems solved with the mixed curves `Ψ^ε`.
    #[default]
    Bc95,
    /// Temple rules: per-family strengths carried through interactions exactly.
    /// Only meaningful for systems whose wave curves are coordinate lines.
    Temple,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineOptions {
    pub scheme: Scheme,
    pub solver: SolverKind,
    pub interaction_cap: usize,
    /// Fronts closer than this at an event time take part in the same interaction.
    pub collision_tol: f64,
    /// At interactions, split a rarefaction of a family with no incoming front into a grid fan.
    pub split_new_rarefactions: bool,
}

impl EngineOptions {
    pub fn new(epsilon: f64) -> Self {
        Self {
            scheme: Scheme::new(epsilon),
            solver: SolverKind::Bc95,
            interaction_cap: 10_000_000,
            collision_tol: 1e-12,
            split_new_rarefactions: true,
        }
    }

    pub fn temple(epsilon: f64) -> Self {
        Self { solver: SolverKind::Temple, ..Self::new(epsilon) }
    }
}

/// A predicted collision of two adjacent fronts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub time: f64,
    pub position: f64,
    pub front_ids: (FrontId, FrontId),
}

/// Every front that ever existed, with its birth and death.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontRecord {
    /// `front.position` is the birth position.
    pub front: Front,
    pub birth_time: f64,
    pub death_time: f64,
}

impl FrontRecord {
    pub fn position_at(&self, t: f64) -> f64 {
        self.front.position + self.front.speed * (t - self.birth_time)
    }

    pub fn alive_at(&self, t: f64) -> bool {
        self.birth_time <= t && t < self.death_time
    }

    pub fn id(&self) -> FrontId {
        self.front.id
    }
}

/// One resolved interaction. Incoming and outgoing ids are ordered left to right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub time: f64,
    pub position: f64,
    pub incoming: Vec<FrontId>,
    pub outgoing: Vec<FrontId>,
    /// More than two incoming fronts met within the collision tolerance.
    pub multi: bool,
}

/// Complete log of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub leftmost_state: RiemannPoint,
    pub t_start: f64,
    pub t_end: f64,
    pub fronts: Vec<FrontRecord>,
    pub interactions: Vec<InteractionRecord>,
}

impl History {
    pub fn front(&self, id: FrontId) -> &FrontRecord {
        &self.fronts[id]
    }

    /// Snapshot at time `t ∈ [t_start, t_end]`.
    pub fn profile_at(&self, t: f64) -> Profile {
        let mut alive: Vec<Front> = self
            .fronts
            .iter()
            .filter(|r| r.alive_at(t) || (t == self.t_end && r.death_time == f64::INFINITY))
            .map(|r| Front { position: r.position_at(t), ..r.front })
            .collect();
        let birth = |f: &Front| self.fronts[f.id].birth_time;
        alive.sort_by(|a, b| {
            a.position
                .total_cmp(&b.position)
                .then(birth(b).total_cmp(&birth(a)))
                .then(a.speed.total_cmp(&b.speed))
                .then(a.id.cmp(&b.id))
        });
        repair_chain(self.leftmost_state, &mut alive);
        Profile { leftmost_state: self.leftmost_state, fronts: alive, time: t }
    }

    /// Ids of the fronts present at `t_start`, left to right.
    pub fn initial_ids(&self) -> Vec<FrontId> {
        self.profile_at(self.t_start).fronts.iter().map(|f| f.id).collect()
    }

    /// Interactions with `t0 < time ≤ t1`, in order.
    pub fn interactions_in(&self, t0: f64, t1: f64) -> impl Iterator<Item = &InteractionRecord> {
        let start = self.interactions.partition_point(|r| r.time <= t0);
        self.interactions[start..].iter().take_while(move |r| r.time <= t1)
    }
}

/// Swaps nearly coincident neighbours whose states do not chain.
fn repair_chain(left: RiemannPoint, fronts: &mut [Front]) {
    let mut prev = left;
    let mut k = 0;
    while k < fronts.len() {
        if fronts[k].left_w != prev {
            if let Some(j) = (k + 1..fronts.len().min(k + 4)).find(|&j| fronts[j].left_w == prev) {
                fronts[k..=j].rotate_right(j - k);
            }
        }
        prev = fronts[k].right_w;
        k += 1;
    }
}

/// Result of [`evolve`].
#[derive(Clone, Debug)]
pub struct Evolution {
    pub initial: Profile,
    pub profile: Profile,
    pub history: History,
}

#[derive(Clone, Copy, Debug)]
struct Event {
    time: f64,
    position: f64,
    left: FrontId,
    right: FrontId,
}

impl PartialEq for Event {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Event {
    fn cmp(&self, o: &Self) -> Ordering {
        self.time
            .total_cmp(&o.time)
            .then(self.position.total_cmp(&o.position))
            .then(self.left.cmp(&o.left))
    }
}

const NIL: usize = usize::MAX;

struct Engine<'a> {
    sys: &'a dyn HyperbolicSystem,
    opts: EngineOptions,
    recs: Vec<FrontRecord>,
    prev: Vec<usize>,
    next: Vec<usize>,
    head: usize,
    heap: BinaryHeap<Reverse<Event>>,
    interactions: Vec<InteractionRecord>,
    now: f64,
    horizon: f64,
}

impl<'a> Engine<'a> {
    fn new(sys: &'a dyn HyperbolicSystem, p: &Profile, horizon: f64, opts: EngineOptions) -> Self {
        let n = p.fronts.len();
        let recs = p
            .fronts
            .iter()
            .enumerate()
            .map(|(i, f)| FrontRecord {
                front: Front { id: i, ..*f },
                birth_time: p.time,
                death_time: f64::INFINITY,
            })
            .collect();
        let mut e = Engine {
            sys,
            opts,
            recs,
            prev: (0..n).map(|i| if i == 0 { NIL } else { i - 1 }).collect(),
            next: (0..n).map(|i| if i + 1 == n { NIL } else { i + 1 }).collect(),
            head: if n == 0 { NIL } else { 0 },
            heap: BinaryHeap::new(),
            interactions: Vec::new(),
            now: p.time,
            horizon,
        };
        for i in 1..n {
            e.schedule(i - 1, i);
        }
        e
    }

    fn pos(&self, id: usize, t: f64) -> f64 {
        self.recs[id].position_at(t)
    }

    fn schedule(&mut self, a: usize, b: usize) {
        let (sa, sb) = (self.recs[a].front.speed, self.recs[b].front.speed);
        if sa <= sb {
            return;
        }
        let gap = (self.pos(b, self.now) - self.pos(a, self.now)).max(0.0);
        let t = self.now + gap / (sa - sb);
        if t <= self.horizon {
            let position = 0.5 * (self.pos(a, t) + self.pos(b, t));
            self.heap.push(Reverse(Event { time: t, position, left: a, right: b }));
        }
    }

    fn alive(&self, id: usize) -> bool {
        self.recs[id].death_time == f64::INFINITY
    }

    fn run(&mut self) -> Result<()> {
        while let Some(Reverse(ev)) = self.heap.pop() {
            if ev.time > self.horizon {
                break;
            }
            if !self.alive(ev.left) || !self.alive(ev.right) || self.next[ev.left] != ev.right {
                continue;
            }
            self.now = self.now.max(ev.time);
            if self.interactions.len() >= self.opts.interaction_cap {
                return Err(Error::InteractionCap { cap: self.opts.interaction_cap, time: self.now });
            }
            self.resolve(ev)?;
        }
        Ok(())
    }

    fn resolve(&mut self, ev: Event) -> Result<()> {
        let t = self.now;
        let x = 0.5 * (self.pos(ev.left, t) + self.pos(ev.right, t));
        let tol = self.opts.collision_tol;
        let mut left = ev.left;
        while self.prev[left] != NIL && (self.pos(self.prev[left], t) - x).abs() <= tol {
            left = self.prev[left];
        }
        let mut right = ev.right;
        while self.next[right] != NIL && (self.pos(self.next[right], t) - x).abs() <= tol {
            right = self.next[right];
        }
        let mut incoming = vec![left];
        while *incoming.last().unwrap() != right {
            incoming.push(self.next[*incoming.last().unwrap()]);
        }
        let w_l = self.recs[left].front.left_w;
        let w_r = self.recs[right].front.right_w;
        let inc: Vec<Front> = incoming.iter().map(|&i| self.recs[i].front).collect();
        let protos = outgoing_fronts(self.sys, w_l, w_r, Some(&inc), &self.opts).map_err(|e| {
            Error::Solver(format!("interaction of fronts {incoming:?} at t = {t}, x = {x}: {e}"))
        })?;

        let before = self.prev[left];
        let after = self.next[right];
        for &i in &incoming {
            self.recs[i].death_time = t;
        }
        let mut outgoing = Vec::with_capacity(protos.len());
        for p in protos {
            let id = self.recs.len();
            self.recs.push(FrontRecord {
                front: Front {
                    id,
                    position: x,
                    family: p.family,
                    kind: p.kind,
                    strength: p.strength,
                    speed: p.speed,
                    left_w: p.left,
                    right_w: p.right,
                },
                birth_time: t,
                death_time: f64::INFINITY,
            });
            self.prev.push(NIL);
            self.next.push(NIL);
            outgoing.push(id);
        }
        // relink
        let mut chain = Vec::with_capacity(outgoing.len() + 2);
        chain.push(before);
        chain.extend(&outgoing);
        chain.push(after);
        for w in chain.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a == NIL {
                self.head = b;
            } else {
                self.next[a] = b;
            }
            if b != NIL {
                self.prev[b] = a;
            }
        }
        if let (Some(&first), true) = (outgoing.first(), before != NIL) {
            self.schedule(before, first);
        }
        if let (Some(&last), true) = (outgoing.last(), after != NIL) {
            self.schedule(last, after);
        }
        if outgoing.is_empty() && before != NIL && after != NIL {
            self.schedule(before, after);
        }
        self.interactions.push(InteractionRecord {
            time: t,
            position: x,
            multi: incoming.len() > 2,
            incoming,
            outgoing,
        });
        Ok(())
    }

    fn current_profile(&self, leftmost: RiemannPoint) -> Profile {
        let mut fronts = Vec::new();
        let mut k = self.head;
        while k != NIL {
            fronts.push(Front { position: self.pos(k, self.horizon), ..self.recs[k].front });
            k = self.next[k];
        }
        Profile { leftmost_state: leftmost, fronts, time: self.horizon }
    }
}

/// Evolves `p` to `t_target`, returning the final profile and the complete log.
/// Fronts are renumbered `0..n` in the returned initial profile.
pub fn evolve(sys: &dyn HyperbolicSystem, p: &Profile, t_target: f64, opts: &EngineOptions) -> Result<Evolution> {
    if t_target < p.time {
        return Err(Error::Config(format!("target time {t_target} precedes profile time {}", p.time)));
    }
    let mut eng = Engine::new(sys, p, t_target, *opts);
    let initial = Profile {
        leftmost_state: p.leftmost_state,
        fronts: eng.recs.iter().map(|r| r.front).collect(),
        time: p.time,
    };
    eng.run()?;
    let profile = eng.current_profile(p.leftmost_state);
    Ok(Evolution {
        initial,
        profile,
        history: History {
            leftmost_state: p.leftmost_state,
            t_start: p.time,
            t_end: t_target,
            fronts: eng.recs,
            interactions: eng.interactions,
        },
    })
}

/// Outgoing fronts for the Riemann problem `(w_l, w_r)`; `incoming` is `None` for initial data.
pub(crate) fn outgoing_fronts(
    sys: &dyn HyperbolicSystem,
    w_l: RiemannPoint,
    w_r: RiemannPoint,
    incoming: Option<&[Front]>,
    opts: &EngineOptions,
) -> Result<Vec<FrontProto>> {
    match opts.solver {
        SolverKind::Bc95 => {
            let split = match incoming {
                None => [FanSplit::Grid; 2],
                Some(inc) => Family::BOTH.map(|fam| {
                    if inc.iter().any(|f| f.family == fam) || !opts.split_new_rarefactions {
                        FanSplit::Single
                    } else {
                        FanSplit::Grid
                    }
                }),
            };
            Ok(solve_riemann_with(sys, w_l, w_r, &opts.scheme, split)?.fronts)
        }
        SolverKind::Temple => temple_outgoing(sys, w_l, w_r, incoming, &opts.scheme),
    }
}

/// Rankine–Hugoniot speed `Δf·Δu / |Δu|²`.
pub fn rh_projection_speed(sys: &dyn HyperbolicSystem, l: RiemannPoint, r: RiemannPoint) -> f64 {
    let du = sub(sys.state(r), sys.state(l));
    let df = sub(sys.flux(r), sys.flux(l));
    dot(df, du) / dot(du, du)
}

fn temple_outgoing(
    sys: &dyn HyperbolicSystem,
    w_l: RiemannPoint,
    w_r: RiemannPoint,
    incoming: Option<&[Front]>,
    scheme: &Scheme,
) -> Result<Vec<FrontProto>> {
    let s = match incoming {
        None => [w_r.w1 - w_l.w1, w_r.w2 - w_l.w2],
        Some(inc) => {
            let mut s = [0.0; 2];
            for f in inc {
                s[f.family.index()] += f.strength;
            }
            s
        }
    };
    let w_star = RiemannPoint::new(w_r.w1, w_l.w2);
    let signs = sys.gnl_signs();
    let mut out = Vec::new();
    for (fam, lo, hi) in [(Family::One, w_l, w_star), (Family::Two, w_star, w_r)] {
        let sk = s[fam.index()];
        if sk == 0.0 {
            continue;
        }
        sys.domain().check(hi)?;
        if signs[fam.index()] * sk < 0.0 {
            out.push(FrontProto {
                family: fam,
                kind: WaveKind::Shock,
                strength: sk,
                speed: rh_projection_speed(sys, lo, hi),
                left: lo,
                right: hi,
            });
            continue;
        }
        if incoming.is_some() {
            out.push(FrontProto {
                family: fam,
                kind: WaveKind::Rarefaction,
                strength: sk,
                speed: sys.lambda(fam, hi),
                left: lo,
                right: hi,
            });
            continue;
        }
        let fan = solve_riemann_with(sys, lo, hi, &Scheme::exact_curves(scheme.epsilon), [FanSplit::Grid; 2])?;
        out.extend(fan.fronts.into_iter().filter(|f| f.family == fam).map(|mut f| {
            f.left = f.left.with(fam.other(), lo.get(fam.other()));
            f.right = f.right.with(fam.other(), lo.get(fam.other()));
            f
        }));
        if let Some(last) = out.last_mut() {
            last.right = hi;
        }
    }
    Ok(out)
}

/// Earliest collision among adjacent approaching fronts no later than `horizon`.
/// Ties in time go to the leftmost pair.
pub fn next_interaction(p: &Profile, horizon: f64) -> Option<InteractionEvent> {
    let mut best: Option<InteractionEvent> = None;
    for w in p.fronts.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.speed <= b.speed {
            continue;
        }
        let dt = (b.position - a.position).max(0.0) / (a.speed - b.speed);
        let t = p.time + dt;
        if t > horizon {
            continue;
        }
        if best.map_or(true, |e| t < e.time) {
            best = Some(InteractionEvent { time: t, position: a.position + a.speed * dt, front_ids: (a.id, b.id) });
        }
    }
    best
}

/// Advances `p` to the event time and replaces the colliding fronts by the
/// outgoing fan of the Riemann problem between the outer states.
pub fn resolve_interaction(
    sys: &dyn HyperbolicSystem,
    p: &Profile,
    e: &InteractionEvent,
    opts: &EngineOptions,
) -> Result<Profile> {
    let mut q = p.advanced(e.time);
    let k = q
        .fronts
        .iter()
        .position(|f| f.id == e.front_ids.0)
        .filter(|&k| q.fronts.get(k + 1).map(|f| f.id) == Some(e.front_ids.1))
        .ok_or_else(|| Error::Config(format!("fronts {:?} are not adjacent", e.front_ids)))?;
    let tol = opts.collision_tol;
    let (mut lo, mut hi) = (k, k + 1);
    while lo > 0 && (q.fronts[lo - 1].position - e.position).abs() <= tol {
        lo -= 1;
    }
    while hi + 1 < q.fronts.len() && (q.fronts[hi + 1].position - e.position).abs() <= tol {
        hi += 1;
    }
    let inc: Vec<Front> = q.fronts[lo..=hi].to_vec();
    let protos = outgoing_fronts(sys, inc[0].left_w, inc[inc.len() - 1].right_w, Some(&inc), opts)?;
    let mut next_id = p.fronts.iter().map(|f| f.id + 1).max().unwrap_or(0);
    let new: Vec<Front> = protos
        .into_iter()
        .map(|f| {
            next_id += 1;
            Front {
                id: next_id - 1,
                position: e.position,
                family: f.family,
                kind: f.kind,
                strength: f.strength,
                speed: f.speed,
                left_w: f.left,
                right_w: f.right,
            }
        })
        .collect();
    q.fronts.splice(lo..=hi, new);
    Ok(q)
}

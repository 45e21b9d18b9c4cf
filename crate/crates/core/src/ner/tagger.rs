//! NER model training, end-to-end tagging, and model persistence.

use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;

use super::conll::Document;
use super::features::{document_sequences, entity_types, FeatureConfig, Resources};
use crate::crf::persist::{field, number};
use crate::crf::{
    decode_bilou, train_crf, train_stacked, CrfModel, CrfTrainConfig, FeatureAlphabet, LabelAlphabet, RawSequence, Span,
    StackedConfig, StackedModel, DEFAULT_FOLDS, DEFAULT_STACK_RADIUS,
};
use crate::error::{Error, Result};
use crate::util::{self, LineReader};

pub const NER_FORMAT_VERSION: u32 = 1;
const NER_MAGIC: &str = "lexemb-ner";

#[derive(Clone, Debug, PartialEq)]
pub enum NerCrf {
    Single(CrfModel),
    Stacked(StackedModel),
}

impl NerCrf {
    fn labels(&self) -> &LabelAlphabet {
        match self {
            NerCrf::Single(m) => m.labels(),
            NerCrf::Stacked(m) => m.labels(),
        }
    }

    fn dense_dim(&self) -> usize {
        match self {
            NerCrf::Single(m) => m.dense_dim(),
            NerCrf::Stacked(m) => m.dense_dim(),
        }
    }

    fn predict(&self, raw: &RawSequence) -> Vec<usize> {
        match self {
            NerCrf::Single(m) => m.viterbi(&raw.lookup(m.features())),
            NerCrf::Stacked(m) => m.predict(raw),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NerTrainConfig {
    pub features: FeatureConfig,
    pub crf: CrfTrainConfig,
    pub stacked: bool,
    pub folds: usize,
    pub stack_radius: usize,
}

impl Default for NerTrainConfig {
    fn default() -> Self {
        NerTrainConfig {
            features: FeatureConfig::default(),
            crf: CrfTrainConfig::default(),
            stacked: true,
            folds: DEFAULT_FOLDS,
            stack_radius: DEFAULT_STACK_RADIUS,
        }
    }
}

/// A trained tagger plus the resource signature it was trained with.
#[derive(Clone, Debug, PartialEq)]
pub struct NerModel {
    pub features: FeatureConfig,
    pub gazetteers: Vec<String>,
    pub clusters: bool,
    pub embedding_dim: usize,
    pub crf: NerCrf,
}

fn sequences(docs: &[Document], resources: &Resources, config: &FeatureConfig, labels: Option<&LabelAlphabet>) -> Result<Vec<RawSequence>> {
    let per_doc: Vec<Vec<RawSequence>> = docs
        .par_iter()
        .map(|d| document_sequences(d, resources, config, labels))
        .collect::<Result<_>>()?;
    Ok(per_doc.into_iter().flatten().collect())
}

/// Trains a single or stacked CRF tagger on `docs`. Entity types are the
/// sorted set of types seen in the training data.
pub fn train_ner(docs: &[Document], resources: &Resources, config: &NerTrainConfig) -> Result<NerModel> {
    if let Some(m) = &resources.embeddings {
        if !(config.features.scale > 0.0 && config.features.scale.is_finite()) {
            return Err(Error::InvalidArgument(format!("embedding scale must be positive, got {}", config.features.scale)));
        }
        if m.dim() == 0 {
            return Err(Error::InvalidArgument("embeddings have zero width".into()));
        }
    }
    let labels = LabelAlphabet::new(&entity_types(docs))?;
    let data = sequences(docs, resources, &config.features, Some(&labels))?;
    let dense_dim = resources.dense_dim(&config.features);
    let crf = if config.stacked {
        let cfg = StackedConfig {
            crf: config.crf.clone(),
            folds: config.folds,
            radius: config.stack_radius,
        };
        NerCrf::Stacked(train_stacked(&data, labels, dense_dim, &cfg)?)
    } else {
        let mut alphabet = FeatureAlphabet::new();
        let instances: Vec<_> = data.iter().map(|r| r.intern(&mut alphabet)).collect();
        NerCrf::Single(train_crf(&instances, labels, alphabet, dense_dim, &config.crf)?)
    };
    Ok(NerModel {
        features: config.features.clone(),
        gazetteers: resources.gazetteers.names().to_vec(),
        clusters: resources.clusters.is_some(),
        embedding_dim: resources.embeddings.as_ref().map_or(0, |m| m.dim()),
        crf,
    })
}

impl NerModel {
    pub fn labels(&self) -> &LabelAlphabet {
        self.crf.labels()
    }

    /// Checks that `resources` match what the model was trained with.
    pub fn check_resources(&self, resources: &Resources) -> Result<()> {
        let dim = resources.embeddings.as_ref().map_or(0, |m| m.dim());
        if dim != self.embedding_dim {
            return Err(Error::InvalidArgument(format!(
                "model expects embeddings of width {}, resources provide {}",
                self.embedding_dim, dim
            )));
        }
        if resources.dense_dim(&self.features) != self.crf.dense_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.crf.dense_dim(),
                found: resources.dense_dim(&self.features),
            });
        }
        if resources.gazetteers.names() != self.gazetteers.as_slice() {
            return Err(Error::InvalidArgument(format!(
                "model expects gazetteers [{}], resources provide [{}]",
                self.gazetteers.join(", "),
                resources.gazetteers.names().join(", ")
            )));
        }
        if resources.clusters.is_some() != self.clusters {
            return Err(Error::InvalidArgument(format!(
                "model was trained {} Brown clusters",
                if self.clusters { "with" } else { "without" }
            )));
        }
        Ok(())
    }

    /// Predicted spans for each sentence of `doc`.
    pub fn tag(&self, doc: &Document, resources: &Resources) -> Result<Vec<Vec<Span>>> {
        self.check_resources(resources)?;
        let seqs = document_sequences(doc, resources, &self.features, None)?;
        Ok(seqs.iter().map(|r| decode_bilou(&self.crf.predict(r), self.labels())).collect())
    }

    /// Tags every document, in parallel across documents.
    pub fn tag_all(&self, docs: &[Document], resources: &Resources) -> Result<Vec<Vec<Vec<Span>>>> {
        self.check_resources(resources)?;
        docs.par_iter().map(|d| self.tag(d, resources)).collect()
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{NER_MAGIC} {NER_FORMAT_VERSION}")?;
        writeln!(w, "neighbor_radius\t{}", self.features.neighbor_radius)?;
        writeln!(w, "bag_radius\t{}", self.features.bag_radius)?;
        writeln!(w, "scale\t{}", self.features.scale)?;
        writeln!(w, "neighbor_embeddings\t{}", self.features.neighbor_embeddings)?;
        writeln!(w, "embedding_dim\t{}", self.embedding_dim)?;
        writeln!(w, "clusters\t{}", self.clusters)?;
        writeln!(w, "gazetteers\t{}", self.gazetteers.len())?;
        for g in &self.gazetteers {
            writeln!(w, "{g}")?;
        }
        match &self.crf {
            NerCrf::Single(m) => m.write(&mut w),
            NerCrf::Stacked(m) => m.write(&mut w),
        }
    }

    pub fn read<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let mut lines = LineReader::new(reader, source);
        let line = lines.next_line()?;
        let version: u32 = line
            .strip_prefix(NER_MAGIC)
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| lines.err("not an NER model file"))?;
        if version != NER_FORMAT_VERSION {
            return Err(lines.err(format!("unsupported NER model version {version}")));
        }
        let mut value = |key: &str| -> Result<String> {
            let line = lines.next_line()?;
            Ok(field(&lines, &line, key)?.to_owned())
        };
        let neighbor_radius = value("neighbor_radius")?;
        let bag_radius = value("bag_radius")?;
        let scale = value("scale")?;
        let neighbor_embeddings = value("neighbor_embeddings")?;
        let embedding_dim = value("embedding_dim")?;
        let clusters = value("clusters")?;
        let gaz_count = value("gazetteers")?;
        let features = FeatureConfig {
            neighbor_radius: number(&lines, &neighbor_radius)?,
            bag_radius: number(&lines, &bag_radius)?,
            scale: number(&lines, &scale)?,
            neighbor_embeddings: number(&lines, &neighbor_embeddings)?,
        };
        let embedding_dim = number(&lines, &embedding_dim)?;
        let clusters = number(&lines, &clusters)?;
        let n: usize = number(&lines, &gaz_count)?;
        let mut gazetteers = Vec::with_capacity(n);
        for _ in 0..n {
            gazetteers.push(lines.next_line()?);
        }
        // peek at the block header to pick the CRF kind
        let crf = Self::read_crf(&mut lines)?;
        lines.expect_end()?;
        Ok(NerModel {
            features,
            gazetteers,
            clusters,
            embedding_dim,
            crf,
        })
    }

    fn read_crf<R: BufRead>(lines: &mut LineReader<R>) -> Result<NerCrf> {
        let header = lines.next_line()?;
        lines.push_back(header.clone());
        if header.starts_with("lexemb-stacked") {
            Ok(NerCrf::Stacked(StackedModel::read_from(lines)?))
        } else {
            Ok(NerCrf::Single(CrfModel::read_from(lines)?))
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = util::create_writer(path)?;
        self.write(&mut w).map_err(|e| Error::io(path, e))?;
        util::flush(w, path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(util::open_reader(path)?, &path.display().to_string())
    }
}

/// Tags one document with a trained model: layer-1 Viterbi, layer-2
/// features and Viterbi (for stacked models), then BILOU decoding.
pub fn tag(document: &Document, model: &NerModel, resources: &Resources) -> Result<Vec<Vec<Span>>> {
    model.tag(document, resources)
}

#[cfg(test)]
mod tests {
    use super::super::conll::Sentence;
    use super::*;
    use crate::lexicons::LexiconSet;

    fn toks(s: &str) -> Vec<String> {
        s.split(' ').map(str::to_owned).collect()
    }

    fn toy_docs() -> Vec<Document> {
        let people = ["Alice", "Bob", "Carol", "Dave"];
        let cities = ["Paris", "Rome", "Oslo", "Lima"];
        let mut sentences = Vec::new();
        for (i, p) in people.iter().enumerate() {
            for c in &cities[i % 2..] {
                sentences.push(Sentence::from_tokens(
                    toks(&format!("{p} lives in {c} .")),
                    vec![Span::new(0, 1, "PER"), Span::new(3, 4, "LOC")],
                ));
            }
        }
        vec![Document { id: 0, sentences }]
    }

    #[test]
    fn train_tag_and_round_trip() {
        let docs = toy_docs();
        let mut res = Resources::new();
        res.gazetteers = LexiconSet::from_entries([("city", vec!["paris", "rome"])]).unwrap();
        for stacked in [false, true] {
            let cfg = NerTrainConfig { stacked, folds: 2, ..Default::default() };
            let model = train_ner(&docs, &res, &cfg).unwrap();
            let pred = model.tag(&docs[0], &res).unwrap();
            let gold: Vec<Vec<Span>> = docs[0].sentences.iter().map(|s| s.spans.clone()).collect();
            assert_eq!(pred, gold);
            assert_eq!(model.tag(&docs[0], &res).unwrap(), pred);

            let mut buf = Vec::new();
            model.write(&mut buf).unwrap();
            let back = NerModel::read(&buf[..], "m").unwrap();
            assert_eq!(back, model);
        }
    }

    #[test]
    fn empty_document_and_resource_mismatch() {
        let docs = toy_docs();
        let model = train_ner(&docs, &Resources::new(), &NerTrainConfig { stacked: false, ..Default::default() }).unwrap();
        assert!(model.tag(&Document::default(), &Resources::new()).unwrap().is_empty());
        let mut res = Resources::new();
        res.gazetteers = LexiconSet::from_entries([("city", vec!["paris"])]).unwrap();
        assert!(model.tag(&docs[0], &res).is_err());
    }
}

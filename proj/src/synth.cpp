#include "salecast/synth.hpp"

#include <cmath>
#include <numeric>

#include "salecast/rng.hpp"

namespace salecast {

namespace {

double sigmoid_(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void standardize_inplace(std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= n;
  const double sd = var > 0 ? std::sqrt(var) : 1.0;
  for (double& x : v) x = (x - mean) / sd;
}

Column numeric(std::vector<double> values) {
  Column c;
  c.kind = ColumnKind::NumericReal;
  c.values = std::move(values);
  return c;
}

Column categorical(std::vector<double> values) {
  Column c;
  c.kind = ColumnKind::CategoricalInteger;
  c.values = std::move(values);
  return c;
}

}  // namespace

SynthResult generate_synth(const SynthConfig& config) {
  const std::size_t n = config.n_rows;
  if (n == 0) throw DataError("n_rows must be positive");

  // monthly socio series with mild seeded noise on top of trends
  Rng socio_rng(derive_seed(config.seed, 1));
  std::vector<double> gdp(config.n_months), cpi(config.n_months),
      ppi(config.n_months), hpi(config.n_months), effr(config.n_months),
      months(config.n_months);
  for (int t = 0; t < config.n_months; ++t) {
    months[t] = month_index(config.start_year + t / 12, t % 12 + 1);
    gdp[t] = 15000.0 + 38.0 * t + 60.0 * socio_rng.normal();
    cpi[t] = 255.0 + 0.65 * t + 0.8 * socio_rng.normal();
    ppi[t] = 192.0 + 4.0 * socio_rng.normal();  // deliberately signal-free
    // the signal-bearing series are rough month to month: a model without
    // the socio join can only approximate them through ~120 sale-month
    // splits, so joining delivers real information beyond the date features
    hpi[t] = 280.0 + 0.3 * t + 20.0 * socio_rng.normal();
    effr[t] = 0.4 + 0.002 * t + 0.6 * std::fabs(socio_rng.normal());
  }

  SynthResult out;
  {
    Frame sf;
    Column m;
    m.kind = ColumnKind::DateMonth;
    m.values = months;
    sf.add_column("month", std::move(m));
    sf.add_column("gdp", numeric(gdp));
    sf.add_column("cpi", numeric(cpi));
    sf.add_column("ppi", numeric(ppi));
    sf.add_column("hpi", numeric(hpi));
    sf.add_column("effr", numeric(effr));
    out.socio_frame = sf;
    for (int t = 0; t < config.n_months; ++t)
      out.socio.rows.emplace_back(
          static_cast<int>(months[t]),
          SocioRow{gdp[t], cpi[t], ppi[t], hpi[t], effr[t]});
  }

  Rng rng(derive_seed(config.seed, 2));
  std::vector<double> parid(n), price(n), aprtot(n), sale_date(n), aprland(n),
      aprblgd(n), nbhd(n), rmbed(n), sfla(n), total_area(n), yrblt(n),
      misc_area(n), zip21(n), sasd(n), nsasd(n), stxbl(n), nstxbl(n),
      cotxbl(n), citxbl(n), hx_flag(n), luc(n), mararea(n);
  std::vector<int> month_of(n);

  for (std::size_t i = 0; i < n; ++i) {
    parid[i] = 1000000.0 + static_cast<double>(i);
    month_of[i] = static_cast<int>(rng.uniform_int(config.n_months));
    sale_date[i] = months[month_of[i]];
    yrblt[i] = 1950.0 + std::floor(rng.uniform() * 70.0);
    rmbed[i] = 1.0 + std::floor(rng.uniform() * 5.0);
    sfla[i] = 900.0 + 2200.0 * rng.uniform() + 150.0 * rng.normal();
    if (sfla[i] < 400.0) sfla[i] = 400.0;
    total_area[i] = sfla[i] * 1.4 + 200.0 * std::fabs(rng.normal());
    misc_area[i] = 400.0 * rng.uniform();
    aprland[i] = 20000.0 + 60000.0 * rng.uniform();
    aprblgd[i] = 60.0 * sfla[i] + 30000.0 * rng.normal();
    if (aprblgd[i] < 10000.0) aprblgd[i] = 10000.0;
    aprtot[i] = aprland[i] + aprblgd[i];
    nbhd[i] = std::floor(rng.uniform() * 200.0);
    zip21[i] = 32100.0 + std::floor(rng.uniform() * 20.0);
    luc[i] = std::floor(rng.uniform() * 8.0) * 100.0;
    mararea[i] = 1.0 + std::floor(rng.uniform() * 20.0);
    hx_flag[i] = rng.uniform() < 0.6 ? 1.0 : 0.0;
    sasd[i] = aprtot[i] * (0.85 + 0.1 * rng.uniform());
    nsasd[i] = aprtot[i] * (0.84 + 0.1 * rng.uniform());
    stxbl[i] = sasd[i] * (0.9 + 0.1 * rng.uniform());
    nstxbl[i] = nsasd[i] * (0.85 + 0.1 * rng.uniform());
    cotxbl[i] = nstxbl[i] * (0.95 + 0.05 * rng.uniform());
    citxbl[i] = cotxbl[i] * (0.6 + 0.3 * rng.uniform());
  }

  // ground-truth score over standardized hpi, effr and sfla
  std::vector<double> z_hpi(n), z_effr(n), z_sfla = sfla;
  for (std::size_t i = 0; i < n; ++i) {
    z_hpi[i] = hpi[month_of[i]];
    z_effr[i] = effr[month_of[i]];
  }
  standardize_inplace(z_hpi);
  standardize_inplace(z_effr);
  standardize_inplace(z_sfla);

  double bayes = 0.0, positives = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double score = config.signal_strength *
                         (z_hpi[i] + 0.8 * z_effr[i] + 0.35 * z_sfla[i]);
    const double p = sigmoid_(score);
    bayes += std::max(p, 1.0 - p);
    const int y = rng.uniform() < p ? 1 : 0;
    positives += y;
    // price is placed strictly above or at-most-equal to aprtot so that
    // derive_target reproduces the sampled label exactly
    price[i] = y ? aprtot[i] * (1.05 + 0.4 * rng.uniform())
                 : aprtot[i] * (0.65 + 0.3 * rng.uniform());
  }
  out.bayes_accuracy = bayes / static_cast<double>(n);
  out.prevalence = positives / static_cast<double>(n);

  Frame mf;
  mf.add_column("parid", numeric(std::move(parid)));
  mf.add_column("price", numeric(std::move(price)));
  mf.add_column("aprtot", numeric(std::move(aprtot)));
  {
    Column d;
    d.kind = ColumnKind::DateMonth;
    d.values = std::move(sale_date);
    mf.add_column("sale_date", std::move(d));
  }
  mf.add_column("aprland", numeric(std::move(aprland)));
  mf.add_column("aprblgd", numeric(std::move(aprblgd)));
  mf.add_column("nbhd", categorical(std::move(nbhd)));
  mf.add_column("rmbed", numeric(std::move(rmbed)));
  mf.add_column("sfla", numeric(std::move(sfla)));
  mf.add_column("total_area", numeric(std::move(total_area)));
  mf.add_column("yrblt", numeric(std::move(yrblt)));
  mf.add_column("misc_area", numeric(std::move(misc_area)));
  mf.add_column("zip21", categorical(std::move(zip21)));
  mf.add_column("sasd", numeric(std::move(sasd)));
  mf.add_column("nsasd", numeric(std::move(nsasd)));
  mf.add_column("stxbl", numeric(std::move(stxbl)));
  mf.add_column("nstxbl", numeric(std::move(nstxbl)));
  mf.add_column("cotxbl", numeric(std::move(cotxbl)));
  mf.add_column("citxbl", numeric(std::move(citxbl)));
  mf.add_column("hx_flag", categorical(std::move(hx_flag)));
  mf.add_column("luc", categorical(std::move(luc)));
  mf.add_column("mararea", categorical(std::move(mararea)));
  out.market = std::move(mf);
  return out;
}

}  // namespace salecast

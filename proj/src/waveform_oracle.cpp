#include "zakmul/waveform_oracle.hpp"

#include <fftw3.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace zakmul {

namespace {

// Rounds values within 1e-9 of an integer, so products such as B * T land exactly on it.
double snap(double x) {
    const double r = std::round(x);
    return std::abs(x - r) < 1e-9 ? r : x;
}

long exact_ratio(double num, double den, const char* what) {
    const double r = num / den;
    const long n = std::lround(r);
    if (n <= 0 || std::abs(r - static_cast<double>(n)) > 1e-6) throw std::invalid_argument(what);
    return n;
}

// W_T at pulse instant j / B, with window edges resolved on integer pulse indices.
double window_weight(const FactorizedDDFilter& f, long j, double B) {
    const double u = (static_cast<double>(j) - snap(f.tau_shift * B)) / snap(f.T * B);
    return srrc_spectrum(u, f.bn()) / std::sqrt(f.T);
}

// Nonzero window pulses j with weight, for the user lattice at rate B.
std::vector<std::pair<long, double>> gated_pulses(const FactorizedDDFilter& f, double B) {
    std::vector<std::pair<long, double>> out;
    const long lo = static_cast<long>(std::floor(f.window_lo() * B)) - 1;
    const long hi = static_cast<long>(std::ceil(f.window_hi() * B)) + 1;
    for (long j = lo; j <= hi; ++j)
        if (const double w = window_weight(f, j, B); w != 0.0) out.emplace_back(j, w);
    return out;
}

std::vector<cplx> sampled_kernel(const FactorizedDDFilter& f, double fs, long half) {
    std::vector<cplx> k(static_cast<std::size_t>(2 * half + 1));
    for (long m = -half; m <= half; ++m) k[static_cast<std::size_t>(m + half)] = f.eval_wB(static_cast<double>(m) / fs);
    return k;
}

double kaiser_sinc(double x, int half, double beta) {
    const double r = x / half;
    if (std::abs(r) >= 1.0) return 0.0;
    return sinc(x) * std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / std::cyl_bessel_i(0.0, beta);
}

}  // namespace

WaveformOracle::WaveformOracle(double system_B, double system_T, OracleConfig cfg) : cfg_(cfg) {
    if (cfg.oversampling < 1 || cfg.truncation_lobes < 1 || cfg.interp_half_width < 1)
        throw std::invalid_argument("oracle: oversampling, lobes and interpolator width must be positive");
    if (cfg.time_pad < 0) throw std::invalid_argument("oracle: negative time_pad");
    fs_ = cfg.oversampling * system_B;
    const double pad_samples = cfg.time_pad * fs_;
    if (std::abs(pad_samples - std::round(pad_samples)) > 1e-6)
        throw std::invalid_argument("oracle: time_pad must be a whole number of samples");
    t0_ = -std::round(pad_samples) / fs_;
    len_ = static_cast<std::size_t>(std::llround(system_T * fs_ + 2.0 * std::round(pad_samples)));
}

TDSignal WaveformOracle::blank() const { return TDSignal{fs_, t0_, std::vector<cplx>(len_)}; }

long WaveformOracle::samples_per_pulse(double B) const {
    return exact_ratio(fs_, B, "oracle: sample rate must be an integer multiple of the user bandwidth");
}

TDSignal WaveformOracle::shape(const std::vector<std::pair<double, cplx>>& pulses, const FactorizedDDFilter& f) const {
    TDSignal out = blank();
    const long half = static_cast<long>(std::floor(cfg_.truncation_lobes * fs_ / f.B));
    const auto ker = sampled_kernel(f, fs_, half);
    const long len = static_cast<long>(len_);
    for (const auto& [t, a] : pulses) {
        const double pos = (t - t0_) * fs_;
        const long c = std::lround(pos);
        if (std::abs(pos - static_cast<double>(c)) > 1e-6) throw std::invalid_argument("oracle: pulse off the sample grid");
        const long lo = std::max(-half, -c), hi = std::min(half, len - 1 - c);
        for (long m = lo; m <= hi; ++m) out.samples[static_cast<std::size_t>(c + m)] += a * ker[static_cast<std::size_t>(m + half)];
    }
    return out;
}

TDSignal WaveformOracle::synth_frame(const UserAllocation& u, const FactorizedDDFilter& f, const DDGridSignal& x) const {
    samples_per_pulse(u.B);
    const double amp = std::sqrt(u.tau_p);
    std::vector<std::pair<double, cplx>> pulses;
    for (const auto& [j, w] : gated_pulses(f, u.B)) {
        const long k = pos_mod(j, u.M), n = floor_div(j, u.M);
        cplx acc{};
        for (int l = 0; l < u.N; ++l)
            acc += x(static_cast<int>(k), l) * cis(kTwoPi * static_cast<double>(pos_mod(n * l, u.N)) / u.N);
        if (acc != cplx{}) pulses.emplace_back(static_cast<double>(j) / u.B, amp * w * acc);
    }
    return shape(pulses, f);
}

TDSignal WaveformOracle::synth_carrier(const UserAllocation& u, const FactorizedDDFilter& f, int k, int l) const {
    if (k < 0 || k >= u.M || l < 0 || l >= u.N) throw std::out_of_range("synth_carrier: index outside lattice");
    DDGridSignal x(u.M, u.N);
    x(k, l) = 1.0;
    return synth_frame(u, f, x);
}

DDGridSignal WaveformOracle::rx_sample(const TDSignal& y, const UserAllocation& u, const FactorizedDDFilter& f) const {
    if (y.sample_rate != fs_ || y.t0 != t0_ || y.samples.size() != len_)
        throw std::invalid_argument("rx_sample: signal not on the oracle grid");
    samples_per_pulse(u.B);
    const long half = static_cast<long>(std::floor(cfg_.truncation_lobes * fs_ / f.B));
    const auto ker = sampled_kernel(f, fs_, half);
    const long len = static_cast<long>(len_);
    const double amp = std::sqrt(u.tau_p);
    DDGridSignal out(u.M, u.N);
    for (const auto& [j, w] : gated_pulses(f, u.B)) {
        const long c = std::lround((static_cast<double>(j) / u.B - t0_) * fs_);
        const long lo = std::max(-half, c - (len - 1)), hi = std::min(half, c);
        cplx z{};
        for (long m = lo; m <= hi; ++m) z += y.samples[static_cast<std::size_t>(c - m)] * ker[static_cast<std::size_t>(m + half)];
        z *= amp * w / fs_;
        const int k = static_cast<int>(pos_mod(j, u.M));
        const long n = floor_div(j, u.M);
        for (int l = 0; l < u.N; ++l) out(k, l) += z * cis(-kTwoPi * static_cast<double>(pos_mod(n * l, u.N)) / u.N);
    }
    return out;
}

TDSignal WaveformOracle::matched_output(const TDSignal& y, const FactorizedDDFilter& f) const {
    if (y.sample_rate != fs_ || y.t0 != t0_ || y.samples.size() != len_)
        throw std::invalid_argument("matched_output: signal not on the oracle grid");
    const long half = static_cast<long>(std::floor(cfg_.truncation_lobes * fs_ / f.B));
    const auto ker = sampled_kernel(f, fs_, half);
    const long len = static_cast<long>(len_);
    const long i0 = std::lround(t0_ * fs_);  // t0 lies on the sample grid
    TDSignal out = blank();
    for (long c = 0; c < len; ++c) {
        const double w = window_weight(f, i0 + c, fs_);
        if (w == 0.0) continue;
        const long lo = std::max(-half, c - (len - 1)), hi = std::min(half, c);
        cplx z{};
        for (long m = lo; m <= hi; ++m) z += y.samples[static_cast<std::size_t>(c - m)] * ker[static_cast<std::size_t>(m + half)];
        out.samples[static_cast<std::size_t>(c)] = z * w / fs_;
    }
    return out;
}

TDSignal apply_channel(const TDSignal& x, const ChannelRealization& c, const OracleConfig& cfg) {
    TDSignal y{x.sample_rate, x.t0, std::vector<cplx>(x.samples.size())};
    const long len = static_cast<long>(x.samples.size());
    const int H = cfg.interp_half_width;
    std::vector<double> taps(static_cast<std::size_t>(2 * H));
    for (const auto& p : c.paths) {
        const double shift = p.delay * x.sample_rate;
        long d = static_cast<long>(std::floor(shift));
        double mu = shift - static_cast<double>(d);
        if (mu > 1.0 - 1e-9) {
            ++d;
            mu = 0.0;
        }
        const bool integer = mu < 1e-9;
        // x(t_n - tau) at fractional index n - d - mu; taps over i = n - d - H + 1 .. n - d + H.
        if (!integer)
            for (int m = -H + 1; m <= H; ++m) taps[static_cast<std::size_t>(m + H - 1)] = kaiser_sinc(m - mu, H, cfg.kaiser_beta);
        for (long n = 0; n < len; ++n) {
            cplx v{};
            if (integer) {
                const long i = n - d;
                if (i >= 0 && i < len) v = x.samples[static_cast<std::size_t>(i)];
            } else {
                for (int m = -H + 1; m <= H; ++m) {
                    const long i = n - d - m;
                    if (i >= 0 && i < len) v += x.samples[static_cast<std::size_t>(i)] * taps[static_cast<std::size_t>(m + H - 1)];
                }
            }
            if (v != cplx{}) y.samples[static_cast<std::size_t>(n)] += p.gain * v * cis(kTwoPi * p.doppler * (x.time_of(static_cast<std::size_t>(n)) - p.delay));
        }
    }
    return y;
}

TDSignal add_awgn(TDSignal x, double N0, Rng& g) {
    if (N0 <= 0.0) return x;
    const double var = N0 * x.sample_rate;
    for (auto& s : x.samples) s += complex_normal(g, var);
    return x;
}

TFFractions tf_energy_fractions(const FactorizedDDFilter& f, const UserAllocation& u, const WaveformOracle& o,
                                int k, int l, double dt, double df) {
    const TDSignal x = o.synth_carrier(u, f, k, l);
    const double total = x.energy();
    if (total <= 0.0) return {};
    TFFractions fr;
    const double t_lo = f.tau_shift - 0.5 * f.T + dt, t_hi = f.tau_shift + 0.5 * f.T + dt;
    double in_t = 0;
    for (std::size_t i = 0; i < x.samples.size(); ++i) {
        const double t = x.time_of(i);
        // Sample-index comparison avoids rounding at window edges.
        const double pos = (t - t_lo) * x.sample_rate, pos_hi = (t - t_hi) * x.sample_rate;
        if (snap(pos) >= 0.0 && snap(pos_hi) < 0.0) in_t += std::norm(x.samples[i]);
    }
    fr.in_time = in_t / x.sample_rate / total;

    const int n = static_cast<int>(x.samples.size());
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n)));
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> hold(buf, &fftw_free);
    std::memcpy(buf, x.samples.data(), sizeof(fftw_complex) * static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const double bin = x.sample_rate / n;
    const double f_lo = f.nu_shift - 0.5 * f.B + df, f_hi = f.nu_shift + 0.5 * f.B + df;
    double in_f = 0, all_f = 0;
    for (int i = 0; i < n; ++i) {
        const int kk = i < (n + 1) / 2 ? i : i - n;
        const double e = buf[i][0] * buf[i][0] + buf[i][1] * buf[i][1];
        all_f += e;
        if (snap((kk * bin - f_lo) / bin) >= 0.0 && snap((kk * bin - f_hi) / bin) < 0.0) in_f += e;
    }
    fr.in_band = in_f / all_f;
    return fr;
}

namespace {

template <class T>
void put(std::ofstream& o, T v) {
    static_assert(std::endian::native == std::endian::little, "dump format is little-endian");
    o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& i) {
    T v{};
    i.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!i) throw std::runtime_error("td dump: truncated file");
    return v;
}

}  // namespace

void write_td_dump(const TDSignal& x, const std::filesystem::path& path) {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw std::runtime_error("td dump: cannot open " + path.string());
    o.write("ZKTD", 4);
    put<std::uint32_t>(o, 1);
    put<double>(o, x.sample_rate);
    put<double>(o, x.t0);
    put<std::uint64_t>(o, x.samples.size());
    for (const auto& s : x.samples) {
        put<float>(o, static_cast<float>(s.real()));
        put<float>(o, static_cast<float>(s.imag()));
    }
}

TDSignal read_td_dump(const std::filesystem::path& path) {
    std::ifstream i(path, std::ios::binary);
    if (!i) throw std::runtime_error("td dump: cannot open " + path.string());
    char magic[4];
    i.read(magic, 4);
    if (!i || std::memcmp(magic, "ZKTD", 4) != 0) throw std::runtime_error("td dump: bad magic");
    if (get<std::uint32_t>(i) != 1) throw std::runtime_error("td dump: unsupported version");
    TDSignal x;
    x.sample_rate = get<double>(i);
    x.t0 = get<double>(i);
    const auto n = get<std::uint64_t>(i);
    x.samples.resize(n);
    for (auto& s : x.samples) {
        const float re = get<float>(i), im = get<float>(i);
        s = {re, im};
    }
    return x;
}

}  // namespace zakmul

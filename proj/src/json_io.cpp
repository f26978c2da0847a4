#include "meanking/json_io.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "meanking/experiments.hpp"

namespace meanking {

using nlohmann::json;

std::string basis_set_to_json(const BasisSet& bs) {
    json out;
    out["d"] = bs.d;
    out["k"] = bs.k;
    json bases = json::array();
    for (int b = 0; b < bs.k; ++b) {
        json vectors = json::array();
        for (int i = 0; i < bs.d; ++i) {
            json vec = json::array();
            for (int a = 0; a < bs.d; ++a) {
                Complex z = bs.bases[std::size_t(b)](a, i);
                vec.push_back({z.real(), z.imag()});
            }
            vectors.push_back(std::move(vec));
        }
        bases.push_back(std::move(vectors));
    }
    out["bases"] = std::move(bases);
    return out.dump();
}

BasisSet basis_set_from_json(const std::string& text) try {
    json in = json::parse(text);
    BasisSet bs;
    bs.d = in.at("d").get<int>();
    bs.k = in.at("k").get<int>();
    if (bs.d < 2 || bs.k < 1) throw std::invalid_argument("BasisSet JSON: invalid d or k");
    const auto& bases = in.at("bases");
    if (int(bases.size()) != bs.k) throw std::invalid_argument("BasisSet JSON: wrong basis count");
    for (const auto& vectors : bases) {
        if (int(vectors.size()) != bs.d)
            throw std::invalid_argument("BasisSet JSON: wrong vector count");
        Matrix u(bs.d, bs.d);
        for (int i = 0; i < bs.d; ++i) {
            const auto& vec = vectors[std::size_t(i)];
            if (int(vec.size()) != bs.d)
                throw std::invalid_argument("BasisSet JSON: wrong vector length");
            for (int a = 0; a < bs.d; ++a)
                u(a, i) = Complex(vec[std::size_t(a)][0].get<double>(),
                                  vec[std::size_t(a)][1].get<double>());
        }
        bs.bases.push_back(std::move(u));
    }
    validate_basis_set(bs, 1e-8);
    return bs;
} catch (const json::exception& e) {
    throw std::invalid_argument(std::string("BasisSet JSON: ") + e.what());
}

std::string joint_distribution_to_json(const JointDistribution& jd) {
    json out;
    out["d"] = jd.d;
    out["k"] = jd.k;
    json w = json::array();
    for (auto& [idx, p] : jd.weights)
        if (p >= 1e-12) w.push_back({idx, p});
    out["weights"] = std::move(w);
    return out.dump();
}

JointDistribution joint_distribution_from_json(const std::string& text) try {
    json in = json::parse(text);
    JointDistribution jd;
    jd.d = in.at("d").get<int>();
    jd.k = in.at("k").get<int>();
    long n = pow_long(jd.d, jd.k);
    long prev = -1;
    for (const auto& entry : in.at("weights")) {
        long idx = entry[0].get<long>();
        double p = entry[1].get<double>();
        if (idx < 0 || idx >= n) throw std::invalid_argument("JointDistribution JSON: index out of range");
        if (idx <= prev) throw std::invalid_argument("JointDistribution JSON: indices not sorted");
        if (p < -1e-12) throw std::invalid_argument("JointDistribution JSON: negative weight");
        jd.weights.emplace_back(idx, std::max(p, 0.0));
        prev = idx;
    }
    if (jd.total() > 1.0 + 1e-9)
        throw std::invalid_argument("JointDistribution JSON: total exceeds 1");
    return jd;
} catch (const json::exception& e) {
    throw std::invalid_argument(std::string("JointDistribution JSON: ") + e.what());
}

std::string strategy_to_json(const Strategy& st) {
    const int d2 = st.d * st.d;
    Matrix sum = st.povm_sum();
    if ((sum - Matrix::Identity(d2, d2)).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("strategy_to_json: POVM does not sum to identity");
    if (std::abs((st.S.adjoint() * st.S).trace().real() - 1.0) > 1e-12)
        throw std::invalid_argument("strategy_to_json: tr(S*S) != 1");

    json out;
    out["d"] = st.d;
    out["k"] = st.k;
    json s = json::array();
    for (int a = 0; a < st.d; ++a) {
        json row = json::array();
        for (int b = 0; b < st.d; ++b)
            row.push_back({st.S(a, b).real(), st.S(a, b).imag()});
        s.push_back(std::move(row));
    }
    out["S"] = std::move(s);
    json povm = json::array();
    for (std::size_t pos = 0; pos < st.outcomes.size(); ++pos) {
        Matrix f = st.povm_element(pos);
        json tri = json::array();
        for (int r = 0; r < d2; ++r)
            for (int c = 0; c <= r; ++c) tri.push_back({f(r, c).real(), f(r, c).imag()});
        povm.push_back({st.outcomes[pos].index, std::move(tri)});
    }
    out["povm"] = std::move(povm);
    return out.dump();
}

std::string sdp_result_to_json(const SdpResult& res) {
    json out = json::parse(joint_distribution_to_json(res.weights));
    out["value"] = res.value;
    out["gap"] = res.gap;
    out["iterations"] = res.iterations;
    return out.dump();
}

std::string report_csv_header() {
    return "d,k,N,p_s,p_s_lo,p_s_hi,e_s,e_s_stderr,seed,seconds";
}

std::string report_csv_row(const ExperimentReport& rep) {
    std::ostringstream os;
    os.precision(10);
    os << rep.d << ',' << rep.k << ',' << rep.samples << ',' << rep.p_s << ','
       << rep.p_s_interval.lo << ',' << rep.p_s_interval.hi << ',' << rep.e_s << ','
       << rep.e_s_stderr << ',' << rep.seed << ',' << rep.seconds;
    return os.str();
}

}  // namespace meanking

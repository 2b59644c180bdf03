#include "fockdyson/bundle.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"

namespace fockdyson {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<double> Manifest::number(const std::string& key) const {
    const auto it = numbers.find(key);
    if (it == numbers.end()) return std::nullopt;
    return it->second;
}

std::string Manifest::to_json() const {
    json j;
    j["model"] = model;
    j["numbers"] = json::object();
    for (const auto& [k, v] : numbers) j["numbers"][k] = v;
    j["labels"] = json::object();
    for (const auto& [k, v] : labels) j["labels"][k] = v;
    return j.dump(2);
}

Manifest Manifest::from_json(const std::string& text) {
    Manifest m;
    try {
        const json j = json::parse(text);
        m.model = j.at("model").get<std::string>();
        if (j.contains("numbers"))
            for (const auto& [k, v] : j.at("numbers").items()) m.numbers[k] = v.get<double>();
        if (j.contains("labels"))
            for (const auto& [k, v] : j.at("labels").items()) m.labels[k] = v.get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }
    return m;
}

std::string Manifest::hash() const {
    const std::string text = to_json();
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return hex.str();
}

ModelBundle::ModelBundle(ComplexSparseMatrix h0, ComplexSparseMatrix h1, ComplexSparseMatrix a,
                         Manifest manifest)
    : h0_(std::move(h0)), h1_(std::move(h1)), a_(std::move(a)), manifest_(std::move(manifest)) {
    if (h0_.dim() != h1_.dim() || h0_.dim() != a_.dim()) {
        std::ostringstream msg;
        msg << "bundle operators have different dimensions: H0 " << h0_.dim() << ", H1 " << h1_.dim()
            << ", A " << a_.dim();
        throw DimensionError(msg.str());
    }
    const std::pair<const char*, const ComplexSparseMatrix*> ops[] = {{"H0", &h0_}, {"H1", &h1_}, {"A", &a_}};
    for (const auto& [name, op] : ops)
        if (!op->hermitian())
            throw NotHermitianError(std::string("bundle operator ") + name + " is not flagged Hermitian",
                                    numerics::hermitian_defect(op->storage()));
}

void write_bundle(const std::string& directory, const ModelBundle& bundle) {
    fs::create_directories(directory);
    const fs::path dir(directory);
    numerics::write_matrix((dir / "H0.mtx").string(), bundle.h0());
    numerics::write_matrix((dir / "H1.mtx").string(), bundle.h1());
    numerics::write_matrix((dir / "A.mtx").string(), bundle.a());
    std::ofstream out(dir / "manifest.json");
    if (!out) throw Error("cannot write manifest in " + directory);
    out << bundle.manifest().to_json() << '\n';
}

ModelBundle read_bundle(const std::string& directory) {
    const fs::path dir(directory);
    std::ifstream in(dir / "manifest.json");
    if (!in) throw ParseError("bundle directory has no manifest.json: " + directory);
    std::stringstream text;
    text << in.rdbuf();
    Manifest manifest = Manifest::from_json(text.str());
    auto h0 = numerics::read_matrix((dir / "H0.mtx").string());
    auto h1 = numerics::read_matrix((dir / "H1.mtx").string());
    auto a = numerics::read_matrix((dir / "A.mtx").string());
    return ModelBundle(std::move(h0), std::move(h1), std::move(a), std::move(manifest));
}

}  // namespace fockdyson
